"""Ground Dirichlet eigenvalues over nonpositive potentials with unit gamma-norm.

Phase-flow eigensolver, independent oracles, a numerical certificate of the
phase estimate, the explicit bound U(gamma) < pi^2 and search-based lower
bounds L(gamma).
"""

__version__ = "0.1.0"

from .errors import DomainError, IntegrationError, NormalizationError, OutOfPruferDomain, PotentialError
from .potentials import (
    Constant,
    EdgeWells,
    GridSampled,
    PiecewiseConstant,
    Potential,
    Well,
    constant,
    edge_wells,
    evaluate,
    from_grid,
    gamma_norm,
    normalize_to_admissible,
    piecewise,
    potential_from_json,
    single_well,
)
from .prufer import (
    EigenSolution,
    PhaseTrajectory,
    SolverControl,
    eigenvalue_dirichlet,
    integrate_phase,
    phase_defect,
    terminal_phase,
)
from .oracles import FdConfig, fd_ground_eigenvalue, well_eigenvalue_transcendental
from .chain import ChainReport, build_report, incomplete_sine_integral, verify
from .bounds import (
    BoundCurve,
    BoundResult,
    epsilon_star,
    final_bound_constant,
    reference_facts,
    upper_bound,
)
from .search import SearchResult, eigen_gradient, family_scan, lower_bound, projected_ascent
