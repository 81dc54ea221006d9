"""Nonpositive potentials on [0, 1]: construction, evaluation, gamma-norms.

Every representation compiles to a piecewise-linear *segment table*
``(breaks, left, slope)``: on ``[breaks[k], breaks[k+1])`` the potential is
``left[k] + slope[k] * (x - breaks[k])``.  The integrators and oracles only
ever see that table, so new families need nothing beyond ``segments()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, NormalizationError, PotentialError

__all__ = [
    "Potential",
    "Constant",
    "PiecewiseConstant",
    "Well",
    "EdgeWells",
    "GridSampled",
    "constant",
    "piecewise",
    "single_well",
    "edge_wells",
    "from_grid",
    "evaluate",
    "gamma_norm",
    "normalize_to_admissible",
    "check_gamma",
    "potential_from_json",
    "potential_to_json",
]


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise PotentialError(f"{name} must be finite, got {value!r}")
    return value


def _strict_partition(name, xs):
    xs = tuple(float(x) for x in xs)
    if len(xs) < 2:
        raise PotentialError(f"{name} needs at least two entries")
    if xs[0] != 0.0 or xs[-1] != 1.0:
        raise PotentialError(f"{name} must start at 0 and end at 1, got {xs[0]!r}..{xs[-1]!r}")
    if any(not math.isfinite(x) for x in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
        raise PotentialError(f"{name} must be strictly increasing")
    return xs


def _nonpositive(name, vs):
    vs = tuple(_finite(name, v) for v in vs)
    if any(v > 0.0 for v in vs):
        raise PotentialError(f"{name} must be <= 0")
    # normalise -0.0 so that serialisation is stable
    return tuple(v + 0.0 for v in vs)


class Potential:
    """Base class. Subclasses are frozen dataclasses."""

    kind = ""

    def segments(self):
        raise NotImplementedError

    def scaled(self, s):
        """Return ``s * q`` in the same representation (``s >= 0``)."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def __call__(self, x):
        return evaluate(self, x)

    def max_depth(self):
        breaks, left, slope = self.segments()
        right = left + slope * np.diff(breaks)
        return float(max(-left.min(), -right.min(), 0.0))

    def is_zero(self):
        return self.max_depth() == 0.0


@dataclass(frozen=True)
class Constant(Potential):
    value: float
    kind = "constant"

    def __post_init__(self):
        object.__setattr__(self, "value", _nonpositive("value", [self.value])[0])

    def segments(self):
        return np.array([0.0, 1.0]), np.array([self.value]), np.zeros(1)

    def scaled(self, s):
        return Constant(s * self.value)

    def to_dict(self):
        return {"type": "constant", "value": self.value}


@dataclass(frozen=True)
class PiecewiseConstant(Potential):
    breakpoints: tuple
    values: tuple
    kind = "piecewise"

    def __post_init__(self):
        xs = _strict_partition("breakpoints", self.breakpoints)
        vs = _nonpositive("values", self.values)
        if len(vs) != len(xs) - 1:
            raise PotentialError("piecewise potential needs one value per cell")
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", vs)

    def segments(self):
        vs = np.asarray(self.values)
        return np.asarray(self.breakpoints), vs, np.zeros_like(vs)

    def scaled(self, s):
        return replace(self, values=tuple(s * v for v in self.values))

    def to_dict(self):
        return {"type": "piecewise", "breakpoints": list(self.breakpoints), "values": list(self.values)}


@dataclass(frozen=True)
class Well(Potential):
    """``q = -depth`` on ``[center - width/2, center + width/2]`` clipped to [0, 1]."""

    center: float
    width: float
    depth: float
    kind = "well"

    def __post_init__(self):
        c, w, d = (_finite(n, getattr(self, n)) for n in ("center", "width", "depth"))
        if not 0.0 < c < 1.0:
            raise PotentialError(f"well center must lie in (0, 1), got {c!r}")
        if w <= 0.0:
            raise PotentialError(f"well width must be positive, got {w!r}")
        if d < 0.0:
            raise PotentialError(f"well depth must be >= 0, got {d!r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "width", w)
        object.__setattr__(self, "depth", d)

    @property
    def support(self):
        return max(0.0, self.center - self.width / 2), min(1.0, self.center + self.width / 2)

    def segments(self):
        a, b = self.support
        xs, vs = [0.0], []
        if a > 0.0:
            xs.append(a)
            vs.append(0.0)
        vs.append(-self.depth)
        if b < 1.0:
            xs.append(b)
            vs.append(0.0)
        xs.append(1.0)
        vs = np.array(vs) + 0.0
        return np.array(xs), vs, np.zeros_like(vs)

    def scaled(self, s):
        return replace(self, depth=s * self.depth)

    def to_dict(self):
        return {"type": "well", "center": self.center, "width": self.width, "depth": self.depth}


@dataclass(frozen=True)
class EdgeWells(Potential):
    """``q = -depth`` on ``[0, width]`` and on ``[1 - width, 1]``."""

    width: float
    depth: float
    kind = "edge_wells"

    def __post_init__(self):
        w, d = _finite("width", self.width), _finite("depth", self.depth)
        if not 0.0 < w < 0.5:
            raise PotentialError(f"edge well width must lie in (0, 1/2), got {w!r}")
        if d < 0.0:
            raise PotentialError(f"edge well depth must be >= 0, got {d!r}")
        object.__setattr__(self, "width", w)
        object.__setattr__(self, "depth", d)

    def segments(self):
        w, d = self.width, self.depth
        vs = np.array([-d, 0.0, -d]) + 0.0
        return np.array([0.0, w, 1.0 - w, 1.0]), vs, np.zeros(3)

    def scaled(self, s):
        return replace(self, depth=s * self.depth)

    def to_dict(self):
        return {"type": "edge_wells", "width": self.width, "depth": self.depth}


@dataclass(frozen=True)
class GridSampled(Potential):
    """Linear interpolation of ``(abscissae, ordinates)``."""

    abscissae: tuple
    ordinates: tuple
    kind = "grid"

    def __post_init__(self):
        xs = _strict_partition("abscissae", self.abscissae)
        qs = _nonpositive("ordinates", self.ordinates)
        if len(qs) != len(xs):
            raise PotentialError("grid potential needs one ordinate per abscissa")
        object.__setattr__(self, "abscissae", xs)
        object.__setattr__(self, "ordinates", qs)

    def segments(self):
        xs, qs = np.asarray(self.abscissae), np.asarray(self.ordinates)
        return xs, qs[:-1].copy(), np.diff(qs) / np.diff(xs)

    def scaled(self, s):
        return replace(self, ordinates=tuple(s * v for v in self.ordinates))

    def to_dict(self):
        return {"type": "grid", "abscissae": list(self.abscissae), "ordinates": list(self.ordinates)}


# -- constructors -----------------------------------------------------------

def constant(value):
    return Constant(value)


def piecewise(breakpoints, values):
    return PiecewiseConstant(tuple(breakpoints), tuple(values))


def single_well(center, width, depth):
    return Well(center, width, depth)


def edge_wells(width, depth):
    return EdgeWells(width, depth)


def from_grid(xs, qs):
    return GridSampled(tuple(xs), tuple(qs))


# -- evaluation and norms ---------------------------------------------------

def check_gamma(gamma, chain=False):
    """Validate a gamma exponent; ``chain=True`` additionally demands gamma < 1/2."""
    gamma = float(gamma)
    if not (math.isfinite(gamma) and gamma > 0.0):
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    if chain and not gamma < 0.5:
        raise DomainError(f"gamma must lie in (0, 1/2), got {gamma!r}")
    return gamma


def segment_index(breaks, x):
    """Index of the segment containing ``x`` (right-continuous, last segment closed)."""
    k = np.searchsorted(breaks, x, side="right") - 1
    return np.clip(k, 0, len(breaks) - 2)


def evaluate(q, x):
    """Pointwise value of ``q``; accepts scalars or arrays in [0, 1]."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0) or np.any(np.isnan(xa)):
        raise DomainError("evaluation point outside [0, 1]")
    breaks, left, slope = q.segments()
    k = segment_index(breaks, xa)
    out = left[k] + slope[k] * (xa - breaks[k])
    if np.ndim(out) == 0:
        return float(out)
    return out


def _linear_power_integral(a, b, length, gamma):
    # integral of t^gamma along a linear ramp from a to b (both >= 0)
    if a == b or abs(b - a) <= 1e-9 * max(a, b):
        m = 0.5 * (a + b)
        return length * m ** gamma
    p = gamma + 1.0
    return length * (b ** p - a ** p) / (p * (b - a))


def gamma_norm(q, gamma):
    """``integral_0^1 |q(x)|^gamma dx``, exact for every representation."""
    gamma = check_gamma(gamma)
    breaks, left, slope = q.segments()
    lengths = np.diff(breaks)
    if isinstance(q, GridSampled):
        depths = np.abs(np.asarray(q.ordinates))
        terms = [_linear_power_integral(depths[i], depths[i + 1], lengths[i], gamma)
                 for i in range(len(lengths))]
        return math.fsum(terms)
    return math.fsum(np.abs(left) ** gamma * lengths)


def normalize_to_admissible(q, gamma):
    """Scale ``q`` so that its gamma-norm equals one."""
    n = gamma_norm(q, gamma)
    if n <= 0.0:
        raise NormalizationError("the zero potential cannot be normalized")
    return q.scaled(n ** (-1.0 / gamma))


# -- JSON -------------------------------------------------------------------

_FIELDS = {
    "constant": ("value",),
    "piecewise": ("breakpoints", "values"),
    "well": ("center", "width", "depth"),
    "edge_wells": ("width", "depth"),
    "grid": ("abscissae", "ordinates"),
}


def potential_from_json(obj):
    """Build a potential from its JSON object form; raises ``PotentialError``."""
    if not isinstance(obj, dict):
        raise PotentialError("potential must be a JSON object")
    kind = obj.get("type")
    if kind not in _FIELDS:
        raise PotentialError(f"unknown potential type {kind!r}; expected one of {sorted(_FIELDS)}")
    fields = _FIELDS[kind]
    missing = [f for f in fields if f not in obj]
    extra = sorted(set(obj) - set(fields) - {"type"})
    if missing:
        raise PotentialError(f"{kind} potential missing field(s) {missing}")
    if extra:
        raise PotentialError(f"{kind} potential has unexpected field(s) {extra}")
    for f in fields:
        v = obj[f]
        is_list = kind in ("piecewise", "grid")
        if is_list and not (isinstance(v, list) and all(_is_number(t) for t in v)):
            raise PotentialError(f"field {f!r} must be a list of numbers")
        if not is_list and not _is_number(v):
            raise PotentialError(f"field {f!r} must be a number")
    if kind == "constant":
        return Constant(obj["value"])
    if kind == "piecewise":
        return piecewise(obj["breakpoints"], obj["values"])
    if kind == "well":
        return Well(obj["center"], obj["width"], obj["depth"])
    if kind == "edge_wells":
        return EdgeWells(obj["width"], obj["depth"])
    return from_grid(obj["abscissae"], obj["ordinates"])


def potential_to_json(q):
    return q.to_dict()


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)
