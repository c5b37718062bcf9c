"""Incompressible vertical-slice flow solver and analysis suite.

Integrates the coupled slice-velocity / transverse-velocity / potential-
temperature system on a closed rectangle, verifies its conservation laws,
constructs and stability-tests equilibrium solutions, and monitors the
blow-up criterion.
"""

from .domain import (
    Constants,
    Grid,
    ScalarField,
    State,
    VectorField,
    inner_product,
    make_grid,
    sample,
    vector_field,
    vector_inner_product,
    volume_integral,
)
from .operators import (
    BoundaryData,
    LerayProjector,
    PoissonDirichletSolver,
    PoissonNeumannSolver,
    advect,
    curl2d,
    div,
    grad,
    leray_project,
    leray_projector,
    perp_grad,
    poisson_dirichlet,
    poisson_neumann,
)
from .dynamics import (
    BlowupError,
    Tendency,
    VortState,
    cfl_dt,
    pressure_solve,
    project_state,
    reconstruct_velocity,
    rhs_primitive,
    rhs_vorticity,
    step_rk4,
    step_rk4_vorticity,
    vort_from_primitive,
)
from .diagnostics import (
    DiagnosticsRecord,
    E_of_t,
    bkm_accumulate,
    casimir,
    casimir_moments,
    energy,
    gronwall_check,
    make_record,
    potential_vorticity,
    pressure_estimate_check,
    sobolev_norm_sq,
    sup_grad,
)
from .equilibria import (
    EadyParams,
    EcConditionsReport,
    PhiTable,
    StabilityReport,
    eady_phi_prime,
    eady_state,
    ec_conditions_residual,
    formal_stability_field,
    perturbation_experiment,
    phi_from_K,
    q_norm,
    state_difference,
    steady_residual,
    verdicts,
)
from .initial import SplitMix64, random_smooth
from .config import ConfigError, InitialCondition, SimConfig, parse_config
from .snapshot import SnapshotFormatError, read_snapshot, write_snapshot
from .run import DIAG_HEADER, RunResult, build_initial_state, diagnose, run

__version__ = "0.1.0"
