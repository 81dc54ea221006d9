"""Eigenvalue computations independent of the phase flow.

``fd_ground_eigenvalue`` discretises the operator with central differences
and finds the smallest eigenvalue of the tridiagonal matrix by Sturm-count
bisection.  ``well_eigenvalue_transcendental`` propagates exact
trigonometric solutions across the constant pieces of a well potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, OutOfPruferDomain
from .potentials import EdgeWells, Well

__all__ = ["FdConfig", "fd_ground_eigenvalue", "well_eigenvalue_transcendental", "cumulative_integral"]

PI2 = math.pi ** 2


@dataclass(frozen=True)
class FdConfig:
    n: int = 20000
    extrapolate: bool = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16:
            raise DomainError(f"finite-difference grid needs n >= 16 interior points, got {self.n!r}")


def cumulative_integral(q, x):
    """``integral_0^x q`` for an array of abscissae, exact on the segment table."""
    breaks, left, slope = q.segments()
    lengths = np.diff(breaks)
    seg_int = left * lengths + 0.5 * slope * lengths ** 2
    at_breaks = np.concatenate([[0.0], np.cumsum(seg_int)])
    k = np.clip(np.searchsorted(breaks, x, side="right") - 1, 0, len(lengths) - 1)
    t = x - breaks[k]
    return at_breaks[k] + left[k] * t + 0.5 * slope[k] * t ** 2


def _fd_single(q, cells):
    h = 1.0 / cells
    x = np.arange(1, cells) * h
    # potential averaged over the dual cell around each interior node
    qbar = (cumulative_integral(q, x + 0.5 * h) - cumulative_integral(q, x - 0.5 * h)) / h
    h2 = h * h
    lo = float(qbar.min()) - 1.0
    hi = PI2 + 1.0
    return float(_kernels.smallest_eigenvalue(h2 * qbar, h2, lo, hi))


def fd_ground_eigenvalue(q, cfg=None):
    """Smallest eigenvalue of the second-order finite-difference operator.

    With ``cfg.extrapolate`` the values at mesh widths ``h`` and ``h/2`` are
    combined as ``(4 lam(h/2) - lam(h)) / 3``.
    """
    cfg = cfg or FdConfig()
    cells = cfg.n + 1
    coarse = _fd_single(q, cells)
    if not cfg.extrapolate:
        return coarse
    fine = _fd_single(q, 2 * cells)
    return (4.0 * fine - coarse) / 3.0


def _pieces(w):
    if not isinstance(w, (Well, EdgeWells)):
        raise DomainError("transcendental matching needs a Well or EdgeWells potential")
    breaks, left, _ = w.segments()
    return np.diff(breaks), -left


def _shoot(lengths, depths, lam):
    # y(0) = 0, y'(0) = 1; returns y(1)
    y, yp = 0.0, 1.0
    for length, depth in zip(lengths, depths):
        k = math.sqrt(lam + depth)
        c, s = math.cos(k * length), math.sin(k * length)
        y, yp = y * c + yp * s / k, -y * k * s + yp * c
    return y


def well_eigenvalue_transcendental(w, tol=1e-12, scan=512):
    """Ground eigenvalue of a well potential from the matching condition ``y(1; lam) = 0``.

    Below the ground eigenvalue the shooting solution has no zero in (0, 1],
    so ``y(1) > 0``; the first sign change found by scanning ``(lo, pi^2]``
    is refined by bisection.
    """
    lengths, depths = _pieces(w)
    depth = float(depths.max())
    if depth == 0.0:
        return PI2
    lo = PI2 - depth
    floor = lo <= 0.0
    if floor:
        lo = 1e-8
    if _shoot(lengths, depths, lo) <= 0.0:
        if floor:
            raise OutOfPruferDomain("ground state outside Prufer domain: no root bracketed in (0, pi^2)")
        return lo
    grid = np.linspace(lo, PI2, scan + 1)
    prev = lo
    for lam in grid[1:]:
        if _shoot(lengths, depths, lam) <= 0.0:
            a, b = prev, lam
            break
        prev = lam
    else:
        raise OutOfPruferDomain("ground state outside Prufer domain: no root bracketed in (0, pi^2)")
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if _shoot(lengths, depths, m) > 0.0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)
