"""Lowest Dirichlet eigenvalue of ``-y'' + q y = lam y`` via the scaled phase flow.

With ``(y, y'/sqrt(lam)) = rho (sin theta, cos theta)`` the phase obeys

    theta' = sqrt(lam) + |q| sin^2(theta) / sqrt(lam),      theta(0) = 0,

and ``log rho' = (q / sqrt(lam)) sin(theta) cos(theta)``.  The terminal phase
``theta(1; lam)`` is strictly increasing in ``lam`` and equals ``pi`` exactly
at the ground eigenvalue, which is then located by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrationError, OutOfPruferDomain
from .potentials import segment_index

__all__ = [
    "SolverControl",
    "PhaseTrajectory",
    "EigenSolution",
    "integrate_phase",
    "terminal_phase",
    "eigenvalue_dirichlet",
    "phase_defect",
]

PI2 = math.pi ** 2
LAMBDA_FLOOR = 1e-8


@dataclass(frozen=True)
class SolverControl:
    """Accuracy settings for the adaptive integrator.

    ``h_max`` caps the step so every trajectory carries at least ``1/h_max``
    steps; downstream quadratures use those samples directly.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    h_max: float = 1.0 / 512


DEFAULT_CONTROL = SolverControl()


@dataclass(frozen=True, eq=False)
class PhaseTrajectory:
    lam: float
    nodes: np.ndarray
    theta: np.ndarray
    theta_prime: np.ndarray


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """Ground state sampled on the integrator grid.

    Samples come in triples ``grid[2k], grid[2k+1], grid[2k+2]`` (step start,
    dense midpoint, step end); every triple lies inside a single segment of
    the potential, so Simpson's rule applies to each triple.
    """

    lambda0: float
    grid: np.ndarray
    y: np.ndarray
    y_prime: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    sigma: np.ndarray
    solver_tolerance: float
    potential: object = field(repr=False)

    def summary(self):
        return {
            "lambda0": self.lambda0,
            "solver_tolerance": self.solver_tolerance,
            "n_samples": int(self.grid.size),
            "theta_end": float(self.theta[-1]),
            "phase_defect": phase_defect(self),
        }


def _check_lambda(lam):
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 0.0):
        raise DomainError(f"spectral parameter must be positive, got {lam!r}")
    return lam


def _flow(q, lam, control, record, x0=0.0, x1=1.0, th0=0.0, lr0=0.0):
    breaks, left, slope = q.segments()
    args = (breaks, left, slope, lam, x0, x1, th0, lr0, control.rtol, control.atol, control.h_max)
    dummy = np.empty(1)
    status, n, x, th, lr = _kernels.integrate(*args, dummy, dummy, dummy, False)
    if status != _kernels.STATUS_OK:
        raise IntegrationError("step size underflow in phase integration", x)
    if not record:
        return th, lr
    xs, ths, lrs = np.empty(n), np.empty(n), np.empty(n)
    _kernels.integrate(*args, xs, ths, lrs, True)
    xs[-1] = x1
    return xs, ths, lrs


def _advance(q, lam, x0, th0, x1, control=DEFAULT_CONTROL):
    """Phase at ``x1`` given the phase ``th0`` at ``x0``."""
    if x1 == x0:
        return th0
    return _flow(q, lam, control, False, x0=x0, x1=x1, th0=th0)[0]


def _theta_prime(q, lam, xs, theta):
    sq = math.sqrt(lam)
    return sq - q(xs) * np.sin(theta) ** 2 / sq


def integrate_phase(q, lam, control=None):
    """Integrate the phase flow on [0, 1] and return the sampled trajectory."""
    lam = _check_lambda(lam)
    control = control or DEFAULT_CONTROL
    xs, th, _ = _flow(q, lam, control, True)
    return PhaseTrajectory(lam, xs, th, _theta_prime(q, lam, xs, th))


def terminal_phase(q, lam, control=None):
    """``theta(1; lam)``."""
    lam = _check_lambda(lam)
    return _flow(q, lam, control or DEFAULT_CONTROL, False)[0]


def eigenvalue_dirichlet(q, tol=1e-10, control=None):
    """Ground Dirichlet eigenvalue by bisection on ``theta(1; lam) = pi``.

    Raises ``OutOfPruferDomain`` when the eigenvalue is not safely positive;
    the finite-difference oracle handles that regime.
    """
    tol = float(tol)
    if not tol > 0.0:
        raise DomainError(f"bracket width must be positive, got {tol!r}")
    control = control or DEFAULT_CONTROL
    lo = PI2 - q.max_depth()
    hi = PI2
    if lo <= LAMBDA_FLOOR:
        lo = LAMBDA_FLOOR
        if _rayleigh_cap(q) <= lo or terminal_phase(q, lo, control) > math.pi:
            raise OutOfPruferDomain(
                "ground eigenvalue is at or below zero; outside the Prufer domain, "
                "use the finite-difference oracle (--oracle fd)")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if terminal_phase(q, mid, control) < math.pi:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    return _solution(q, lam, hi - lo, control)


def _rayleigh_cap(q):
    """Upper bound on lambda0 from a sine bump supported on each single segment.

    Deep narrow wells are rejected by this test before the stiff integration
    at the lambda floor is attempted.
    """
    breaks, left, slope = q.segments()
    lengths = np.diff(breaks)
    shallow = np.minimum(-left, -(left + slope * lengths))
    return float(np.min(PI2 / lengths ** 2 - shallow))


def _solution(q, lam, width, control):
    xs, th, lr = _flow(q, lam, control, True)
    rho = np.exp(lr - lr.max())
    sq = math.sqrt(lam)
    y = rho * np.sin(th)
    rho = rho / np.abs(y).max()
    y = rho * np.sin(th)
    yp = sq * rho * np.cos(th)
    sigma = np.abs(q(xs)) * np.sin(th) ** 2
    return EigenSolution(lam, xs, y, yp, th, rho, sigma, width, q)


def triples(e):
    """Per-step sample triples with one-sided potential values.

    Returns ``(x, theta, q)`` arrays of shape ``(n_steps, 3)``; ``q`` uses the
    formula of the segment that owns the step, so jumps at breakpoints are
    represented by their one-sided limits.
    """
    x = np.stack([e.grid[:-1:2], e.grid[1::2], e.grid[2::2]], axis=1)
    th = np.stack([e.theta[:-1:2], e.theta[1::2], e.theta[2::2]], axis=1)
    breaks, left, slope = e.potential.segments()
    k = segment_index(breaks, x[:, 1])
    qv = left[k, None] + slope[k, None] * (x - breaks[k, None])
    return x, th, qv


def simpson(x, f):
    """Composite Simpson over step triples (midpoint exactly central)."""
    return math.fsum((x[:, 2] - x[:, 0]) / 6.0 * (f[:, 0] + 4.0 * f[:, 1] + f[:, 2]))


def phase_defect(e):
    """``integral_0^1 sigma theta' / (lam + sigma) dx`` by Simpson on the solver grid.

    At the eigenvalue this equals ``pi - sqrt(lambda0)``.
    """
    lam = e.lambda0
    x, th, qv = triples(e)
    sigma = np.abs(qv) * np.sin(th) ** 2
    dth = (lam + sigma) / math.sqrt(lam)
    return simpson(x, sigma * dth / (lam + sigma))
