"""Numerical laboratory for a reduced Camassa-Holm type equation.

Solves v_t + d v v_x = -d/dx (1 - d dxx)^{-1} (d v^2 + (d^2/2) v_x^2) on
a periodic box standing in for the line, classifies initial data against
the proven global-existence and blow-up regimes, machine-checks the
inequalities those proofs rest on, detects wave breaking with certified
time bounds, and verifies the reduction by lifting solutions to the
d-dimensional momentum system.
"""

from .analysis import (
    Classification,
    MarginReport,
    RiccatiTrace,
    SupNormBound,
    Verdict,
    blowup_time_upper_bound,
    boundary_contamination,
    case1_pointwise_bound,
    case2_onesided_bound,
    classify_initial_data,
    convolution_inequality_margin,
    energy,
    riccati_tracker,
    sup_norm_bound,
)
from .config import ConfigError, ScenarioConfig, load_config, validate_config
from .core import (
    BoundaryDecayError,
    Field,
    Grid,
    InitialDataSpec,
    SimParams,
    SimState,
    build_grid,
    sample_initial_data,
    spectral_derivative,
)
from .eplift import EPGridSpec, LiftedFields, ep_residual, lift_field
from .helmholtz import (
    HelmholtzOperator,
    green_kernel,
    helmholtz_apply,
    helmholtz_invert,
    kernel_convolve_direct,
    one_sided_split,
)
from .lagrangian import (
    ParticleSet,
    advance_particles,
    interp,
    momentum_invariant_residual,
    seed_particles,
    sign_frontier,
)
from .rhs import RhsWorkspace, nonlocal_flux, rhs_n, rhs_v, rhs_vx
from .runner import RunResult, execute, run_scenario
from .timestepper import (
    Completed,
    NumericalFailure,
    StepControl,
    WaveBreaking,
    choose_dt,
    integrate,
    step_rk4,
)

__version__ = "0.1.0"
