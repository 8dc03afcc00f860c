"""Numerical laboratory for chemotaxis blowup: moment inequalities,
mass-concentration thresholds, and adaptive blowup detection for the
parabolic-elliptic chemotaxis system in R^d."""

__version__ = "1.0.0"

from .analysis import (
    ConcentrationProfile,
    DatumClassification,
    GenblParams,
    MorreyEstimate,
    annulus_moment,
    classify_datum,
    concentrated_mass,
    default_probe_radii,
    distribution_identity_check,
    fit_exponential_lower_bound,
    genbl_parameters,
    local_moment,
    moment_inequality_residual,
    morrey_estimate,
    radial_concentration,
    second_moment,
)
from .diagnostics import (
    VERDICT_BLEWUP,
    VERDICT_HORIZON,
    VERDICT_INCONCLUSIVE,
    BlowupReport,
    DiagnosticsSeries,
    estimate_blowup_time,
)
from .errors import ConfigError, NumericalError
from .grids import PolarState, RadialState, polar_faces, radial_grid, reconstruct_density
from .initial_data import DatumSpec, make_polar_datum, make_radial_datum, rescale_datum, support_radius
from .nsym2d import (
    Nsym2dSolver,
    PotentialField,
    Run2dResult,
    Run2dSettings,
    run2d,
    solve_potential,
    step2d,
)
from .radial import RadialRunResult, RadialRunSettings, RadialSolver, drift_term, run_radial
from .weights import (
    BEstimate,
    DimConstants,
    blowup_constant,
    estimate_B,
    phi_deriv,
    phi_eval,
    psi_eval,
    psi_grad,
    psi_laplacian,
    psi_radial,
    sphere_area,
)
from .experiment import (
    CANNED_CONFIGS,
    CheckResult,
    ExperimentConfig,
    RunArtifacts,
    SweepRow,
    canned_config,
    find_verdict_transition,
    run_experiment,
    summarize_run,
    sweep,
    verify_static,
)
