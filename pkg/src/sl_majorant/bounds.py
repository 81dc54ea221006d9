"""Explicit upper bound U(gamma) < pi^2 for the ground-eigenvalue majorant.

For ``gamma`` in (0, 1/2) the phase estimate shows that every admissible
potential with ``lambda0 > (pi - eps)^2`` (and ``mu(eps) < pi``,
``lambda0 > 4``) has gamma-norm at most

    C(gamma) * eps ** k(gamma),   C = (pi^2 + 2) / (1 - 2 gamma),
                                  k = (1 - 2 gamma) gamma / (1 - gamma).

A unit norm is therefore impossible once that constant drops below one, which
happens for ``eps < eps_star``.  All small quantities are carried in log form
because ``eps_star`` ranges over hundreds of decades.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum

import mpmath
from scipy.optimize import brentq

from .errors import DomainError
from .potentials import check_gamma

__all__ = [
    "final_bound_constant",
    "log_final_bound",
    "epsilon_star",
    "log_epsilon_star",
    "epsilon_star_root",
    "mu",
    "epsilon_mu_cap",
    "log_epsilon_mu_cap",
    "BoundResult",
    "upper_bound",
    "Classification",
    "ReferenceFact",
    "reference_facts",
    "CurveRow",
    "BoundCurve",
    "CSV_HEADER",
]

PI = math.pi
PI2 = PI * PI
HEADROOM = 1e-6
CSV_HEADER = ["gamma", "lower", "upper", "eps_star", "flags"]


def _exponent(gamma):
    return (1.0 - 2.0 * gamma) * gamma / (1.0 - gamma)


def _log_constant(gamma):
    return math.log(PI2 + 2.0) - math.log1p(-2.0 * gamma)


def log_final_bound(gamma, log_eps):
    gamma = check_gamma(gamma, chain=True)
    return _log_constant(gamma) + _exponent(gamma) * log_eps


def final_bound_constant(gamma, epsilon):
    """``(pi^2 + 2) / (1 - 2 gamma) * epsilon ** ((1 - 2 gamma) gamma / (1 - gamma))``."""
    gamma = check_gamma(gamma, chain=True)
    epsilon = float(epsilon)
    if not epsilon >= 0.0:
        raise DomainError(f"epsilon must be nonnegative, got {epsilon!r}")
    if epsilon == 0.0:
        return 0.0
    return math.exp(log_final_bound(gamma, math.log(epsilon)))


def log_epsilon_star(gamma):
    gamma = check_gamma(gamma, chain=True)
    return -_log_constant(gamma) / _exponent(gamma)


def epsilon_star(gamma):
    """Root of ``final_bound_constant(gamma, eps) = 1`` in closed form (0.0 on underflow)."""
    return math.exp(log_epsilon_star(gamma))


def epsilon_star_root(gamma, xtol=1e-14):
    """``epsilon_star`` from a bracketing solver on ``final_bound_constant - 1``.

    The unknown is ``log(eps)`` so the bracket spans every representable scale.
    """
    gamma = check_gamma(gamma, chain=True)

    def f(u):
        if u > -700.0:
            return final_bound_constant(gamma, math.exp(u)) - 1.0
        return math.expm1(log_final_bound(gamma, u))

    lo = -1.0
    while f(lo) > 0.0:
        lo *= 2.0
        if lo < -1e6:
            raise DomainError("could not bracket epsilon_star")
    u = brentq(f, lo, 0.0, xtol=xtol, rtol=1e-15, maxiter=500)
    return math.exp(u)


def mu(gamma, epsilon):
    """Phase budget ``pi^2 eps^(gamma / (1 - gamma)) + eps`` of the large-weight set."""
    gamma = check_gamma(gamma, chain=True)
    return PI2 * epsilon ** (gamma / (1.0 - gamma)) + epsilon


def log_epsilon_mu_cap(gamma):
    """``log(eps)`` at which ``mu(eps) = pi``; solved in log form since it can underflow."""
    gamma = check_gamma(gamma, chain=True)
    a = gamma / (1.0 - gamma)

    def f(u):
        return math.log(PI2 * math.exp(a * u) + math.exp(u)) - math.log(PI)

    lo = -1.0
    while f(lo) > 0.0:
        lo *= 2.0
    return brentq(f, lo, math.log(PI), xtol=1e-14, rtol=1e-15)


def epsilon_mu_cap(gamma):
    """The ``eps`` at which ``mu(eps) = pi``."""
    return math.exp(log_epsilon_mu_cap(gamma))


@dataclass(frozen=True)
class BoundResult:
    gamma: float
    eps_star: float
    log_eps_star: float
    eps_caps: tuple
    eps_effective: float
    upper: float
    upper_gap: float
    active: str
    log_eps_effective: float = field(repr=False, default=0.0)

    @property
    def flags(self):
        return f"{self.active}_active"

    def upper_mp(self, extra_digits=30):
        """``(pi - eps_effective)^2`` as an mpmath number with enough digits to see the gap."""
        dps = int(-self.log_eps_effective / math.log(10)) + extra_digits
        with mpmath.workdps(max(dps, 30)):
            eps = mpmath.exp(mpmath.mpf(self.log_eps_effective))
            return +(mpmath.pi - eps) ** 2

    def is_strict(self):
        """``U < pi^2`` decided in extended precision."""
        dps = int(-self.log_eps_effective / math.log(10)) + 30
        with mpmath.workdps(max(dps, 30)):
            return bool(self.upper_mp() < mpmath.pi ** 2)

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "eps_star": self.eps_star,
            "log_eps_star": self.log_eps_star,
            "eps_caps": list(self.eps_caps),
            "eps_effective": self.eps_effective,
            "upper": self.upper,
            "upper_gap": self.upper_gap,
            "flags": self.flags,
        }


def upper_bound(gamma):
    """U(gamma) = (pi - eps_effective)^2 with eps_effective the smallest of three caps.

    The caps are ``eps_star``, the ``eps`` with ``mu(eps) = pi`` and
    ``pi - 2 - HEADROOM`` (the last one makes ``lambda0 > 4`` automatic).
    """
    gamma = check_gamma(gamma, chain=True)
    log_star = log_epsilon_star(gamma)
    log_mu = log_epsilon_mu_cap(gamma)
    cap_mu = math.exp(log_mu)
    cap_four = PI - 2.0 - HEADROOM
    candidates = [("eps_star", log_star), ("mu_cap", log_mu), ("lambda4_cap", math.log(cap_four))]
    active, log_eff = min(candidates, key=lambda c: c[1])
    eff = math.exp(log_eff)
    return BoundResult(
        gamma=gamma,
        eps_star=math.exp(log_star),
        log_eps_star=log_star,
        eps_caps=(cap_mu, cap_four),
        eps_effective=eff,
        upper=(PI - eff) ** 2,
        upper_gap=eff * (2.0 * PI - eff),
        active=active,
        log_eps_effective=log_eff,
    )


class Classification(str, Enum):
    EQUALITY_PI2 = "EQUALITY_PI2"
    STRICT_PRIOR = "STRICT_PRIOR"
    STRICT_THIS_PAPER = "STRICT_THIS_PAPER"


@dataclass(frozen=True)
class ReferenceFact:
    gamma: float
    classification: Classification
    citation: str


_CITATIONS = {
    Classification.EQUALITY_PI2: "S. S. Ezhak (2012), Theorem 1.2: M_gamma = pi^2 for gamma >= 1/2",
    Classification.STRICT_PRIOR: "S. S. Ezhak (2012), Theorem 1.2: M_gamma < pi^2 for gamma < 1/3",
    Classification.STRICT_THIS_PAPER: ("M_gamma < pi^2 for gamma in [1/3, 1/2): explicit constant from the "
                                       "Prufer phase estimate, see upper_bound"),
}


def reference_facts(gamma):
    gamma = check_gamma(gamma)
    if gamma >= 0.5:
        c = Classification.EQUALITY_PI2
    elif gamma < 1.0 / 3.0:
        c = Classification.STRICT_PRIOR
    else:
        c = Classification.STRICT_THIS_PAPER
    return ReferenceFact(gamma, c, _CITATIONS[c])


@dataclass(frozen=True)
class CurveRow:
    gamma: float
    lower: float | None
    upper: float | None
    eps_star: float | None
    flags: str


def fmt(x):
    """17 significant digits; empty for missing values."""
    if x is None:
        return ""
    return f"{x:.17g}"


@dataclass(frozen=True)
class BoundCurve:
    rows: tuple

    def __post_init__(self):
        rows = tuple(sorted(self.rows, key=lambda r: r.gamma))
        for r in rows:
            if r.lower is not None and r.upper is not None and r.lower > r.upper + 1e-9:
                raise ValueError(f"lower bound exceeds upper bound at gamma={r.gamma!r}")
        object.__setattr__(self, "rows", rows)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([fmt(r.gamma), fmt(r.lower), fmt(r.upper), fmt(r.eps_star), r.flags])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = []
        reader = csv.DictReader(io.StringIO(text))
        for d in reader:
            rows.append(CurveRow(
                float(d["gamma"]),
                float(d["lower"]) if d["lower"] else None,
                float(d["upper"]) if d["upper"] else None,
                float(d["eps_star"]) if d["eps_star"] else None,
                d["flags"],
            ))
        return cls(tuple(rows))
