"""Lower bounds for the majorant by maximising lambda0 over admissible potentials."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, OutOfPruferDomain
from .oracles import FdConfig, fd_ground_eigenvalue
from .potentials import (
    Constant,
    edge_wells,
    gamma_norm,
    normalize_to_admissible,
    piecewise,
    potential_to_json,
    single_well,
    check_gamma,
)
from .prufer import eigenvalue_dirichlet, triples

__all__ = [
    "SearchResult",
    "eigen_gradient",
    "rescaled_gradient",
    "projected_ascent",
    "family_scan",
    "lower_bound",
    "DEFAULT_GRIDS",
    "worker_count",
]

PI2 = math.pi ** 2

DEFAULT_GRIDS = {
    "constant": [None],
    "single_well": [(c, w) for c in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5) for w in (0.02, 0.05, 0.1, 0.2, 0.4, 0.8)],
    "edge_wells": [0.2, 0.1, 0.05, 0.02, 0.01, 0.005],
}


@dataclass(frozen=True)
class SearchResult:
    gamma: float
    best_potential: object
    lower: float
    strategy: str
    trace: tuple
    seed: int | None = None

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "lower": self.lower,
            "strategy": self.strategy,
            "seed": self.seed,
            "best_potential": potential_to_json(self.best_potential),
            "trace": [dict(t) for t in self.trace],
        }


def worker_count():
    env = os.environ.get("SL_MAJORANT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _pmap(fn, items):
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(n) as pool:
        return list(pool.map(fn, items))


def _partial_integrals(x, f, cuts):
    """``integral_0^c f`` for each cut, from quadratic interpolation on step triples."""
    steps = (x[:, 2] - x[:, 0]) / 6.0 * (f[:, 0] + 4.0 * f[:, 1] + f[:, 2])
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    out = np.empty(len(cuts))
    for n, c in enumerate(cuts):
        s = int(np.clip(np.searchsorted(x[:, 0], c, side="right") - 1, 0, x.shape[0] - 1))
        a, b = x[s, 0], x[s, 2]
        if c >= b:
            out[n] = cum[s + 1]
            continue
        # quadratic through the triple, integrated from a to c
        h = b - a
        u = (c - a) / h
        f0, fm, f1 = f[s]
        c1 = -3.0 * f0 + 4.0 * fm - f1
        c2 = 2.0 * f0 - 4.0 * fm + 2.0 * f1
        out[n] = cum[s] + h * (f0 * u + c1 * u ** 2 / 2.0 + c2 * u ** 3 / 3.0)
    return out


def eigen_gradient(e, cells):
    """``d lambda0 / d v_i`` for cell depths ``v_i = |q|`` on the cells ``[cells[i], cells[i+1]]``.

    First-order perturbation: ``-integral_cell y^2 / integral_0^1 y^2``.
    """
    cells = np.asarray(cells, dtype=float)
    x, _, _ = triples(e)
    y = np.stack([e.y[:-1:2], e.y[1::2], e.y[2::2]], axis=1)
    cum = _partial_integrals(x, y ** 2, cells)
    return -np.diff(cum) / (cum[-1] - cum[0])


def _solve(q):
    try:
        return eigenvalue_dirichlet(q)
    except (OutOfPruferDomain, IntegrationError):
        return None


def rescaled_gradient(g, v, widths, gamma):
    """Gradient of ``v -> lambda0(s(v) v)`` in log-depth coordinates at a unit-norm ``v``.

    ``s(v)`` is the rescaling onto unit gamma-norm; in ``log v`` the gradient
    ``g_i v_i - (g . v) v_i^gamma w_i`` stays bounded as cells empty out.
    """
    return g * v - float(np.dot(g, v)) * v ** gamma * widths


def projected_ascent(gamma, n_cells=16, seed=0, budget=200):
    """Gradient ascent on cell depths, rescaled back to unit gamma-norm after every step.

    Steps act on ``log v`` along the gradient of the rescaled objective; the
    length comes from a halving line search starting at 0.5 that accepts the
    first increase of lambda0.
    """
    gamma = check_gamma(gamma)
    if n_cells < 2 or budget < 1:
        raise ValueError("projected ascent needs n_cells >= 2 and budget >= 1")
    breaks = np.linspace(0.0, 1.0, n_cells + 1)
    widths = np.diff(breaks)
    rng = np.random.default_rng(seed)
    v = rng.dirichlet(np.ones(n_cells))
    q = normalize_to_admissible(piecewise(breaks, -v), gamma)
    e = _solve(q)
    if e is None:
        lam = fd_ground_eigenvalue(q, FdConfig())
        trace = ({"objective": lam, "step": 0.0, "residual": abs(gamma_norm(q, gamma) - 1.0)},)
        return SearchResult(gamma, q, lam, "projected-ascent", trace, seed)
    trace = [{"objective": e.lambda0, "step": 0.0, "residual": abs(gamma_norm(q, gamma) - 1.0)}]
    for _ in range(budget):
        v = -np.asarray(q.values)
        d = rescaled_gradient(eigen_gradient(e, breaks), v, widths, gamma)
        if not np.abs(d).max() > 0.0:
            break
        d = d / np.abs(d).max()
        step = 0.5
        accepted = None
        while step > 1e-8:
            trial = v * np.exp(step * d)
            q_try = normalize_to_admissible(piecewise(breaks, -trial), gamma)
            e_try = _solve(q_try)
            if e_try is not None and e_try.lambda0 > e.lambda0:
                accepted = (q_try, e_try)
                break
            step *= 0.5
        if accepted is None:
            break
        previous = e.lambda0
        q, e = accepted
        trace.append({"objective": e.lambda0, "step": step, "residual": abs(gamma_norm(q, gamma) - 1.0)})
        if (e.lambda0 - previous) <= 1e-9 * abs(previous):
            break
    return SearchResult(gamma, q, e.lambda0, "projected-ascent", tuple(trace), seed)


def _member(family, params, gamma):
    if family == "constant":
        q = Constant(-1.0)
    elif family == "single_well":
        c, w = params
        q = single_well(c, w, 1.0)
    elif family == "edge_wells":
        q = edge_wells(params, 1.0)
    else:
        raise ValueError(f"unknown family {family!r}")
    return normalize_to_admissible(q, gamma)


def family_scan(gamma, family, grid=None):
    """Best member of a one- or two-parameter family, each member at unit gamma-norm.

    Members outside the Prufer domain are evaluated by the finite-difference
    oracle, recorded in the trace and excluded from the maximum.
    """
    gamma = check_gamma(gamma)
    grid = list(DEFAULT_GRIDS[family] if grid is None else grid)
    if not grid:
        raise ValueError("family scan needs a nonempty grid")

    def run(params):
        q = _member(family, params, gamma)
        e = _solve(q)
        if e is None:
            return q, fd_ground_eigenvalue(q, FdConfig()), "fd"
        return q, e.lambda0, "prufer"

    results = _pmap(run, grid)
    trace = []
    best = None
    for params, (q, lam, method) in zip(grid, results):
        trace.append({
            "objective": lam,
            "params": params if params is None or np.isscalar(params) else list(params),
            "method": method,
            "residual": abs(gamma_norm(q, gamma) - 1.0),
        })
        if method == "prufer" and (best is None or lam > best[1]):
            best = (q, lam)
    if best is None:
        i = int(np.argmax([t["objective"] for t in trace]))
        best = (results[i][0], results[i][1])
    return SearchResult(gamma, best[0], best[1], family, tuple(trace), None)


def lower_bound(gamma, budget=200, seeds=8, n_cells=16):
    """Best of the family scans and a multistart projected ascent; ``L(gamma) = result.lower``."""
    gamma = check_gamma(gamma)
    scans = [family_scan(gamma, f) for f in ("constant", "single_well", "edge_wells")]
    ascents = _pmap(lambda s: projected_ascent(gamma, n_cells, s, budget), range(seeds))
    best = None
    for r in scans + ascents:
        if best is None or r.lower > best.lower:
            best = r
    return best
