"""Compiled inner loops: Dormand-Prince 5(4) phase flow and Sturm counts.

The phase state is ``(theta, log rho)``.  Step control looks at ``theta``
only, so the terminal phase does not depend on whether the amplitude is
requested.  Steps never cross a segment break of the potential.
"""

import math

import numpy as np
from numba import njit

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (-71 / 57600, 71 / 16695, -71 / 1920,
                          17253 / 339200, -22 / 525, 1 / 40)

# continuous extension (Shampine); row j gives the theta-polynomial weight of stage j
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])
_HALF = _P @ np.array([0.5, 0.25, 0.125, 0.0625])
D1, D2, D3, D4, D5, D6, D7 = (float(v) for v in _HALF)

STATUS_OK = 0
STATUS_UNDERFLOW = 1

H_MIN = 1e-13


@njit(cache=True, nogil=True)
def _rhs(x, th, sq, qa, qs, xa):
    q = qa + qs * (x - xa)
    s = math.sin(th)
    c = math.cos(th)
    return sq - q * s * s / sq, q * s * c / sq


@njit(cache=True, nogil=True)
def integrate(breaks, qa, qs, lam, x0, x1, th0, lr0, rtol, atol, hmax,
              out_x, out_th, out_lr, record):
    """Advance the flow from ``x0`` to ``x1``.

    With ``record`` set, every accepted step appends its dense midpoint and its
    right end to the output arrays (index 0 holds the start).  Returns
    ``(status, n_samples, x_reached, theta, log_rho)``.
    """
    sq = math.sqrt(lam)
    nseg = breaks.shape[0] - 1
    k = 0
    while k < nseg - 1 and breaks[k + 1] <= x0:
        k += 1
    x = x0
    th = th0
    lr = lr0
    n = 0
    if record:
        out_x[0] = x
        out_th[0] = th
        out_lr[0] = lr
    n = 1
    h = min(hmax, 1e-3)
    while k < nseg and x < x1:
        xb = min(breaks[k + 1], x1)
        if k == nseg - 1:
            xb = x1
        xa, a, b = breaks[k], qa[k], qs[k]
        while x < xb:
            last = False
            if x + h >= xb:
                h = xb - x
                last = True
            k1t, k1r = _rhs(x, th, sq, a, b, xa)
            k2t, k2r = _rhs(x + C2 * h, th + h * A21 * k1t, sq, a, b, xa)
            k3t, k3r = _rhs(x + C3 * h, th + h * (A31 * k1t + A32 * k2t), sq, a, b, xa)
            k4t, k4r = _rhs(x + C4 * h, th + h * (A41 * k1t + A42 * k2t + A43 * k3t), sq, a, b, xa)
            k5t, k5r = _rhs(x + C5 * h, th + h * (A51 * k1t + A52 * k2t + A53 * k3t + A54 * k4t),
                            sq, a, b, xa)
            k6t, k6r = _rhs(x + h, th + h * (A61 * k1t + A62 * k2t + A63 * k3t + A64 * k4t
                                             + A65 * k5t), sq, a, b, xa)
            th_new = th + h * (B1 * k1t + B3 * k3t + B4 * k4t + B5 * k5t + B6 * k6t)
            lr_new = lr + h * (B1 * k1r + B3 * k3r + B4 * k4r + B5 * k5r + B6 * k6r)
            k7t, k7r = _rhs(x + h, th_new, sq, a, b, xa)
            err = abs(h * (E1 * k1t + E3 * k3t + E4 * k4t + E5 * k5t + E6 * k6t + E7 * k7t))
            scale = atol + rtol * max(abs(th), abs(th_new))
            ratio = err / scale
            if ratio <= 1.0:
                if record:
                    out_x[n] = x + 0.5 * h
                    out_th[n] = th + h * (D1 * k1t + D3 * k3t + D4 * k4t + D5 * k5t
                                          + D6 * k6t + D7 * k7t)
                    out_lr[n] = lr + h * (D1 * k1r + D3 * k3r + D4 * k4r + D5 * k5r
                                          + D6 * k6r + D7 * k7r)
                    out_x[n + 1] = xb if last else x + h
                    out_th[n + 1] = th_new
                    out_lr[n + 1] = lr_new
                n += 2
                x = xb if last else x + h
                th = th_new
                lr = lr_new
                if ratio == 0.0:
                    fac = 5.0
                else:
                    fac = min(5.0, max(0.2, 0.9 * ratio ** -0.2))
                h = min(hmax, h * fac)
            else:
                h = h * max(0.2, 0.9 * ratio ** -0.2)
                if h < H_MIN:
                    return STATUS_UNDERFLOW, n, x, th, lr
        k += 1
    return STATUS_OK, n, x, th, lr


@njit(cache=True, nogil=True)
def count_below(cq, h2, lam):
    """Eigenvalues below ``lam`` of the scaled Dirichlet matrix ``tridiag(-1, 2 + cq, -1) / h2``.

    LDL^T pivot signs (Sylvester inertia) written for the shifted pivots
    ``g_i = h2 * d_i - 1``: ``g_i = c_i + g_{i-1} / (1 + g_{i-1})`` with
    ``c_i = cq_i - h2 * lam``.  No ``2/h^2``-sized quantity is ever formed, so
    the count stays reliable for very fine grids.
    """
    count = 0
    g = 1.0 + cq[0] - h2 * lam
    if 1.0 + g < 0.0:
        count += 1
    for i in range(1, cq.shape[0]):
        p = 1.0 + g
        if p == 0.0:
            p = 1e-300
        g = cq[i] - h2 * lam + g / p
        if 1.0 + g < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def smallest_eigenvalue(cq, h2, lo, hi):
    """Bisection on the Sturm count down to adjacent floating-point numbers."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if count_below(cq, h2, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
