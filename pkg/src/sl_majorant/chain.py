"""Numerical certificate for the phase-estimate chain of one (q, gamma, eps).

``build_report`` evaluates every quantity of the estimate on a computed
ground state; ``verify`` turns the quantities into named inequality
verdicts.  Integrals carrying ``sin(theta)^(-2 gamma)`` are taken in the
phase variable, where the singularity is the explicit ``t^(-2 gamma)`` kind
handled by ``incomplete_sine_integral``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import final_bound_constant, mu as mu_of
from .errors import DomainError
from .potentials import check_gamma, gamma_norm, segment_index
from .prufer import _advance, phase_defect, triples

__all__ = [
    "incomplete_sine_integral",
    "ChainReport",
    "Verdict",
    "build_report",
    "verify",
    "overall_status",
    "sigma_at",
    "e_set",
]

PI = math.pi

# 48-point Gauss-Legendre on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _half_integral(m, gamma):
    # integral_0^m sin^(-2g) for 0 <= m <= pi/2 after u = x^(1-2g):
    # the integrand becomes (x / sin x)^(2g) / (1 - 2g), smooth on [0, pi/2]
    if m == 0.0:
        return 0.0
    p = 1.0 - 2.0 * gamma
    top = m ** p
    total = 0.0
    panels = 4
    for j in range(panels):
        a, b = top * j / panels, top * (j + 1) / panels
        u = a + (b - a) * _GL_X
        x = u ** (1.0 / p)
        ratio = np.where(x > 0.0, x / np.sin(np.where(x > 0.0, x, 1.0)), 1.0)
        total += (b - a) * float(np.dot(_GL_W, ratio ** (2.0 * gamma)))
    return total / p


def incomplete_sine_integral(m, gamma):
    """``integral_0^m sin(x)^(-2 gamma) dx`` for ``0 <= m <= pi`` and ``0 < gamma < 1/2``."""
    gamma = check_gamma(gamma, chain=True)
    m = float(m)
    if not 0.0 <= m <= PI:
        raise DomainError(f"upper limit must lie in [0, pi], got {m!r}")
    if m <= PI / 2:
        return _half_integral(m, gamma)
    return 2.0 * _half_integral(PI / 2, gamma) - _half_integral(PI - m, gamma)


def _sine_primitive(theta, gamma):
    return incomplete_sine_integral(min(max(theta, 0.0), PI), gamma)


@dataclass(frozen=True)
class ChainReport:
    gamma: float
    epsilon: float
    lambda0: float
    threshold_t: float
    mu: float
    lebesgue_measure_E: float
    phase_measure_E: float
    J_E: float
    J_C: float
    sine_cap_E: float
    sine_cap_total: float
    defect: float
    gamma_norm_direct: float
    gamma_norm_via_phase: float
    final_bound: float
    am_gm_violations: int
    E_intervals: tuple
    slacks: dict
    preconditions_met: dict

    @property
    def applicable(self):
        return all(self.preconditions_met.values())

    def to_dict(self):
        d = asdict(self)
        d["E_intervals"] = [list(iv) for iv in self.E_intervals]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["E_intervals"] = tuple(tuple(iv) for iv in d["E_intervals"])
        return cls(**d)


def sigma_at(e, x, side="right"):
    """``sigma(x) = |q(x)| sin^2 theta(x)`` by re-integrating from the nearest sample.

    ``side`` picks the one-sided limit at a jump of the potential.
    """
    q = e.potential
    breaks, left, slope = q.segments()
    k = int(segment_index(breaks, x))
    if side == "left" and x > 0.0 and k > 0 and x == breaks[k]:
        k -= 1
    # last sample inside segment k at or before x
    lo = np.searchsorted(e.grid, breaks[k], side="left")
    i = max(int(np.searchsorted(e.grid, x, side="right")) - 1, lo)
    th = _advance(q, e.lambda0, float(e.grid[i]), float(e.theta[i]), float(x))
    qv = left[k] + slope[k] * (x - breaks[k])
    return abs(qv) * math.sin(th) ** 2, th


def _crossing(q, lam, x0, th0, x1, qa, qs, xa, t, inside_left):
    # bisection for sigma = t on (x0, x1); sigma - t changes sign across the interval
    a, b = x0, x1
    th_b = None
    for _ in range(60):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        th_m = _advance(q, lam, x0, th0, m)
        s = abs(qa + qs * (m - xa)) * math.sin(th_m) ** 2
        if (s > t) == inside_left:
            a = m
        else:
            b, th_b = m, th_m
    if th_b is None:
        th_b = _advance(q, lam, x0, th0, b)
    return b, th_b


def e_set(e, t):
    """Intervals ``[(a, b, theta(a), theta(b)), ...]`` where ``sigma > t``.

    Ties go to the complement.  Crossings inside a step are located by
    bisection; jumps of the potential at breakpoints close or open intervals
    exactly at the breakpoint.
    """
    q = e.potential
    lam = e.lambda0
    breaks, left, slope = q.segments()
    x, th, qv = triples(e)
    sig = np.abs(qv) * np.sin(th) ** 2
    k = segment_index(breaks, x[:, 1])
    intervals = []
    open_at = None
    for s in range(x.shape[0]):
        inside = sig[s] > t
        qa, qs, xa = left[k[s]], slope[k[s]], breaks[k[s]]
        if inside[0] and open_at is None:
            open_at = (x[s, 0], th[s, 0])
        elif not inside[0] and open_at is not None:
            intervals.append((open_at[0], x[s, 0], open_at[1], th[s, 0]))
            open_at = None
        for j in (0, 1):
            if inside[j] == inside[j + 1]:
                continue
            xr, thr = _crossing(q, lam, x[s, j], th[s, j], x[s, j + 1], qa, qs, xa, t, inside[j])
            if inside[j]:
                intervals.append((open_at[0], xr, open_at[1], thr))
                open_at = None
            else:
                open_at = (xr, thr)
    if open_at is not None:
        intervals.append((open_at[0], float(x[-1, 2]), open_at[1], float(th[-1, 2])))
    return [tuple(float(v) for v in iv) for iv in intervals if iv[1] > iv[0]]


def _simpson_nonuniform(a, m, b, fa, fm, fb):
    # quadratic through (a, fa), (m, fm), (b, fb) integrated over [a, b]
    h = b - a
    al = (m - a) / h
    return h * (fa * (0.5 - 1.0 / (6.0 * al)) + fm / (6.0 * al * (1.0 - al))
                + fb * (2.0 - 3.0 * al) / (6.0 * (1.0 - al)))


def _via_phase(e, gamma):
    # sqrt(lam) * integral sigma^g sin^(-2g)(theta) / (lam + sigma) dtheta, Simpson in theta
    lam = e.lambda0
    _, th, qv = triples(e)
    s = np.abs(np.sin(th))
    sigma = np.abs(qv) * s ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(s > 0.0, sigma ** gamma / s ** (2.0 * gamma), np.abs(qv) ** gamma)
    g = w / (lam + sigma)
    parts = _simpson_nonuniform(th[:, 0], th[:, 1], th[:, 2], g[:, 0], g[:, 1], g[:, 2])
    return math.sqrt(lam) * math.fsum(parts)


def build_report(e, q, gamma, epsilon=None):
    """Evaluate every quantity of the estimate chain for the ground state ``e`` of ``q``.

    ``epsilon`` defaults to ``1.01 * (pi - sqrt(lambda0))``.  The three
    preconditions are recorded, not enforced; ``verify`` gates on them.
    """
    gamma = check_gamma(gamma, chain=True)
    if q != e.potential:
        raise DomainError("eigen solution was computed for a different potential")
    lam = e.lambda0
    sq = math.sqrt(lam)
    if epsilon is None:
        epsilon = 1.01 * (PI - sq)
    epsilon = float(epsilon)
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")

    t = epsilon ** ((1.0 - 2.0 * gamma) / (1.0 - gamma))
    tg = t ** gamma
    mu = mu_of(gamma, epsilon)
    ivs = e_set(e, t)
    leb = math.fsum(b - a for a, b, _, _ in ivs)
    phase_e = math.fsum(tb - ta for _, _, ta, tb in ivs)
    j_e = math.fsum(_sine_primitive(tb, gamma) - _sine_primitive(ta, gamma) for _, _, ta, tb in ivs)
    # theta(1) = pi exactly at the eigenvalue; the sampled end phase carries the bisection
    # residual, which the singular integrand near pi would amplify as delta^(1-2g)
    j_c = incomplete_sine_integral(PI, gamma) - j_e
    cap_e = 2.0 * incomplete_sine_integral(min(0.5 * mu, PI / 2), gamma)
    cap_total = incomplete_sine_integral(PI, gamma)
    defect = phase_defect(e)
    direct = gamma_norm(q, gamma)
    via = _via_phase(e, gamma)
    final = final_bound_constant(gamma, epsilon)

    _, th, qv = triples(e)
    sigma = np.abs(qv) * np.sin(th) ** 2
    am_gm = lam + sigma - 2.0 * sq * sigma ** gamma
    k = (1.0 - 2.0 * gamma) * gamma / (1.0 - gamma)

    slacks = {
        "defect_lt_epsilon": epsilon - defect,
        "phase_measure_E_lt_mu": mu - phase_e,
        "J_E_le_sine_cap_E": cap_e - j_e,
        "sine_cap_E_lt_closed_form": 2.0 * PI ** 2 / (1.0 - 2.0 * gamma) * epsilon ** k - cap_e,
        "J_C_le_sine_cap_total": cap_total - j_c,
        "sine_cap_total_lt_4_over": 4.0 / (1.0 - 2.0 * gamma) - cap_total,
        "am_gm_pointwise": float(am_gm.min()),
        "split_bound": 0.5 * j_e + tg / sq * j_c - direct,
        "final_bound": final - direct,
    }
    pre = {
        "lambda0_gt_pi_minus_eps_sq": lam > (PI - epsilon) ** 2,
        "lambda0_gt_4": lam > 4.0,
        "mu_lt_pi": mu < PI,
    }
    return ChainReport(
        gamma=gamma, epsilon=epsilon, lambda0=lam, threshold_t=t, mu=mu,
        lebesgue_measure_E=leb, phase_measure_E=phase_e, J_E=j_e, J_C=j_c,
        sine_cap_E=cap_e, sine_cap_total=cap_total, defect=defect,
        gamma_norm_direct=direct, gamma_norm_via_phase=via, final_bound=final,
        am_gm_violations=int(np.count_nonzero(am_gm < 0.0)),
        E_intervals=tuple((a, b) for a, b, _, _ in ivs),
        slacks=slacks, preconditions_met=pre,
    )


@dataclass(frozen=True)
class Verdict:
    name: str
    slack: float
    status: str
    statement: str


STATEMENTS = {
    "defect_lt_epsilon": "phase defect pi - sqrt(lambda0) < eps",
    "phase_measure_E_lt_mu": "int_E theta' dx < mu(eps)",
    "J_E_le_sine_cap_E": "int_E sin^-2g(theta) theta' dx <= 2 int_0^{mu/2} sin^-2g",
    "sine_cap_E_lt_closed_form": "2 int_0^{mu/2} sin^-2g < 2 pi^2/(1-2g) eps^k",
    "J_C_le_sine_cap_total": "int_C sin^-2g(theta) theta' dx <= int_0^pi sin^-2g",
    "sine_cap_total_lt_4_over": "int_0^pi sin^-2g < 4/(1-2g)",
    "am_gm_pointwise": "2 sqrt(lambda0) sigma^g <= lambda0 + sigma on the grid",
    "split_bound": "int |q|^g <= J_E/2 + t^g/sqrt(lambda0) J_C",
    "final_bound": "int |q|^g <= (pi^2+2)/(1-2g) eps^k",
}


def verify(r, tol=1e-6):
    """One verdict per inequality of the chain.

    When a precondition fails a single ``not applicable`` verdict is returned.
    A report of a unit-norm potential whose final bound is below one gets an
    extra ``contradiction`` verdict: such a potential cannot exist.
    """
    if not r.applicable:
        failed = ", ".join(k for k, v in r.preconditions_met.items() if not v)
        return [Verdict("preconditions", None, "not applicable", f"failed: {failed}")]
    out = []
    for name, statement in STATEMENTS.items():
        slack = r.slacks[name]
        out.append(Verdict(name, slack, "pass" if slack >= -tol else "fail", statement))
    if abs(r.gamma_norm_direct - 1.0) <= tol and r.final_bound < 1.0:
        out.append(Verdict("contradiction", r.final_bound - 1.0, "contradiction",
                           "contradiction: q not in A_gamma regime (unit norm exceeds the final bound)"))
    return out


def overall_status(verdicts):
    statuses = {v.status for v in verdicts}
    if "not applicable" in statuses:
        return "NOT APPLICABLE"
    if "contradiction" in statuses:
        return "CONTRADICTION"
    if "fail" in statuses:
        return "FAIL"
    return "PASS"
