import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sl_majorant.errors import DomainError, OutOfPruferDomain
from sl_majorant.potentials import constant, edge_wells, from_grid, gamma_norm, piecewise, single_well
from sl_majorant.prufer import (
    SolverControl,
    eigenvalue_dirichlet,
    integrate_phase,
    phase_defect,
    terminal_phase,
)

PI2 = math.pi ** 2

# Terminal phase of q = -1 at lam = pi^2 from the exact solution y = sin(kx), k = sqrt(pi^2 + 1):
# theta(1) = pi + atan2(sin k, k cos k / pi) since theta has passed pi once.
THETA_END_MINUS_ONE = 3.289700570871255
# Ground state of Well(0.5, 0.5, 8) from exact trigonometric matching.
WELL_05_05_8 = 3.239764334540663


def random_piecewise(rng, cells=8, vmax=5.0):
    return piecewise(np.linspace(0.0, 1.0, cells + 1), -rng.uniform(0.0, vmax, cells))


def test_free_trajectory_is_linear():
    tr = integrate_phase(constant(0.0), PI2)
    np.testing.assert_allclose(tr.theta, math.pi * tr.nodes, atol=1e-13)
    assert tr.theta[-1] == pytest.approx(math.pi, abs=1e-13)
    assert tr.nodes[0] == 0.0 and tr.nodes[-1] == 1.0


@pytest.mark.parametrize("lam, end", [(4.0, 2.0), (PI2 / 4, math.pi / 2), (PI2, math.pi)])
def test_free_terminal_phase(lam, end):
    assert terminal_phase(constant(0.0), lam) == pytest.approx(end, abs=1e-13)


def test_terminal_phase_constant_matches_exact_solution():
    assert terminal_phase(constant(-1.0), PI2) == pytest.approx(THETA_END_MINUS_ONE, abs=1e-9)


def test_terminal_phase_self_convergence():
    q = constant(-1.0)
    coarse = terminal_phase(q, PI2)
    fine = terminal_phase(q, PI2, SolverControl(rtol=1e-12, atol=1e-14, h_max=1.0 / 1024))
    assert abs(coarse - fine) <= 1e-9


def test_terminal_phase_at_shifted_eigenvalue():
    assert terminal_phase(constant(-1.0), PI2 - 1.0) == pytest.approx(math.pi, abs=1e-8)


def test_breakpoints_are_nodes():
    q = piecewise([0.0, 0.3, 0.71, 1.0], [-1.0, -4.0, 0.0])
    tr = integrate_phase(q, 5.0)
    for b in (0.3, 0.71):
        assert np.any(tr.nodes == b)


@pytest.mark.parametrize("lam", [0.0, -1.0, float("nan")])
def test_nonpositive_lambda(lam):
    with pytest.raises(DomainError):
        integrate_phase(constant(-1.0), lam)


def test_trajectory_invariants():
    rng = np.random.default_rng(3)
    for _ in range(5):
        q = random_piecewise(rng)
        lam = rng.uniform(1.0, PI2)
        tr = integrate_phase(q, lam)
        assert tr.theta[0] == 0.0
        assert np.all(np.diff(tr.theta) > 0.0)
        assert np.all(tr.theta_prime >= math.sqrt(lam) * (1 - 1e-15))


@pytest.mark.parametrize("c, expected", [(0.0, PI2), (-1.0, PI2 - 1.0), (-3.5, PI2 - 3.5)])
def test_constant_eigenvalues(c, expected):
    e = eigenvalue_dirichlet(constant(c))
    assert e.lambda0 == pytest.approx(expected, abs=1e-8)
    assert e.solver_tolerance <= 1e-10


def test_well_matches_transcendental_oracle():
    e = eigenvalue_dirichlet(single_well(0.5, 0.5, 8.0))
    assert e.lambda0 == pytest.approx(WELL_05_05_8, abs=1e-8)


def test_deep_well_out_of_domain():
    with pytest.raises(OutOfPruferDomain, match="--oracle fd"):
        eigenvalue_dirichlet(constant(-40.0))


@pytest.mark.parametrize("tol", [0.0, -1e-3])
def test_bad_tolerance(tol):
    with pytest.raises(DomainError):
        eigenvalue_dirichlet(constant(-1.0), tol=tol)


@pytest.mark.parametrize(
    "q",
    [
        constant(-1.0),
        single_well(0.3, 0.2, 6.0),
        edge_wells(0.05, 20.0),
        from_grid([0.0, 0.4, 1.0], [-3.0, 0.0, -1.0]),
        piecewise([0.0, 0.1, 0.5, 1.0], [-9.0, -0.5, -2.0]),
    ],
)
def test_solution_invariants(q):
    e = eigenvalue_dirichlet(q)
    sq = math.sqrt(e.lambda0)
    assert e.theta[0] == 0.0
    assert abs(e.theta[-1] - math.pi) <= 1e-8
    assert np.all(e.rho > 0.0)
    assert np.abs(e.y).max() == pytest.approx(1.0, abs=1e-15)
    assert np.max(np.abs(e.rho * np.sin(e.theta) - e.y)) <= 1e-6
    assert np.max(np.abs(e.rho * np.cos(e.theta) - e.y_prime / sq)) <= 1e-6
    assert np.all(e.sigma >= 0.0)
    assert e.sigma[0] == 0.0
    assert e.lambda0 < PI2 - e.solver_tolerance


def test_sigma_vanishes_where_q_does():
    e = eigenvalue_dirichlet(single_well(0.5, 0.2, 5.0))
    outside = (e.grid < 0.39) | (e.grid > 0.61)
    assert np.all(e.sigma[outside] == 0.0)


def test_phase_defect_free():
    assert phase_defect(eigenvalue_dirichlet(constant(0.0))) == 0.0


def test_phase_defect_constant():
    e = eigenvalue_dirichlet(constant(-1.0))
    assert phase_defect(e) == pytest.approx(math.pi - math.sqrt(PI2 - 1.0), abs=1e-6)


def test_phase_defect_random_piecewise():
    rng = np.random.default_rng(11)
    for _ in range(10):
        e = eigenvalue_dirichlet(random_piecewise(rng))
        assert abs(phase_defect(e) - (math.pi - math.sqrt(e.lambda0))) <= 1e-6


def test_summary_fields():
    s = eigenvalue_dirichlet(constant(-1.0)).summary()
    assert set(s) == {"lambda0", "solver_tolerance", "n_samples", "theta_end", "phase_defect"}


cell_values = st.lists(st.floats(0.0, 5.0), min_size=1, max_size=6)


@settings(max_examples=25, deadline=None)
@given(v=cell_values, lams=st.lists(st.floats(0.5, 12.0), min_size=2, max_size=5, unique=True))
def test_terminal_phase_monotone_in_lambda(v, lams):
    # d theta'/d lambda = (1 - |q| sin^2 theta / lambda) / (2 sqrt(lambda)) >= 0 once lambda >= max|q|
    q = piecewise(np.linspace(0.0, 1.0, len(v) + 1), [-x for x in v])
    lams = sorted(lam for lam in lams if lam >= max(v))
    if len(lams) < 2 or min(np.diff(lams)) < 1e-6:
        return
    ends = [terminal_phase(q, lam) for lam in lams]
    assert all(a < b for a, b in zip(ends, ends[1:]))


def test_terminal_phase_not_monotone_below_depth():
    # the scaled phase dips for lambda < |q|: theta(1) -> pi as lambda -> 0 when cos(sqrt|q|) < 0
    q = constant(-4.0)
    assert terminal_phase(q, 0.5) > terminal_phase(q, 1.0)


@settings(max_examples=15, deadline=None)
@given(v=cell_values, lams=st.lists(st.floats(1e-3, 12.0), min_size=1, max_size=6))
def test_terminal_phase_crosses_pi_only_at_eigenvalue(v, lams):
    q = piecewise(np.linspace(0.0, 1.0, len(v) + 1), [-x for x in v])
    lam0 = eigenvalue_dirichlet(q).lambda0
    for lam in lams:
        if abs(lam - lam0) > 1e-6:
            assert (terminal_phase(q, lam) < math.pi) == (lam < lam0)


@settings(max_examples=20, deadline=None)
@given(v=cell_values, c=st.floats(0.0, 3.0))
def test_shift_identity(v, c):
    breaks = np.linspace(0.0, 1.0, len(v) + 1)
    q = piecewise(breaks, [-x for x in v])
    shifted = piecewise(breaks, [-x - c for x in v])
    tol = 1e-10
    a = eigenvalue_dirichlet(q, tol=tol).lambda0
    b = eigenvalue_dirichlet(shifted, tol=tol).lambda0
    assert abs(b - (a - c)) <= 2 * tol


@settings(max_examples=20, deadline=None)
@given(v=cell_values)
def test_upper_barrier(v):
    q = piecewise(np.linspace(0.0, 1.0, len(v) + 1), [-x for x in v])
    if gamma_norm(q, 1.0) < 0.01:
        return
    e = eigenvalue_dirichlet(q)
    assert e.lambda0 <= PI2 - e.solver_tolerance


@pytest.mark.parametrize("width, depth", [(0.02, 1e17), (0.005, 1e9), (0.3, 200.0)])
def test_deep_narrow_well_out_of_domain(width, depth):
    with pytest.raises(OutOfPruferDomain):
        eigenvalue_dirichlet(single_well(0.5, width, depth))
