"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class PotentialError(ValueError):
    """A potential description is malformed or violates its invariants."""


class NormalizationError(ValueError):
    """A potential with zero gamma-norm cannot be scaled into the admissible class."""


class IntegrationError(RuntimeError):
    """The adaptive integrator could not advance (step size underflow)."""

    def __init__(self, message, x_reached):
        super().__init__(f"{message} (reached x = {x_reached!r})")
        self.x_reached = x_reached


class OutOfPruferDomain(DomainError):
    """The ground eigenvalue is not positive, so the scaled phase flow degenerates.

    Use the finite-difference oracle (``--oracle fd`` on the command line) instead.
    """
