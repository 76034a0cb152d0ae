"""Connectivity statistics for a chain of vehicles over two-state fading links."""

__version__ = "0.1.0"

from .analytics import (
    ClusterSpec,
    Pmf,
    cluster_existence_curve,
    cluster_existence_prob,
    cluster_formation_prob,
    cluster_lifetime_distribution,
    cluster_lifetime_moments,
    cluster_lifetime_pmf,
    cluster_survival_ratio,
    gamma_factor,
    link_duration_distribution,
    link_duration_moments,
    link_duration_pmf,
    stationary_cluster_prob,
    truncate_pmf,
)
from .channel import (
    ChannelSpec,
    MarkovLink,
    calibrate,
    default_timestep,
    doppler_shift,
    equilibrium,
    level_crossing_rate,
    max_timestep,
    transition_probs,
)
from .errors import (
    BadInterval,
    BadWindow,
    DegenerateChain,
    InsufficientData,
    NonSummable,
    NyquistViolation,
    OutOfRange,
    SupportMismatch,
    TooLarge,
    VanetChainError,
)
from .output import write_scenario_outputs
from .runner import SEED_ENV_VAR, run_scenario
from .scenarios import (
    BUILTIN_SCENARIOS,
    DirectCalibration,
    Experiment,
    PhysicalCalibration,
    Scenario,
    builtin_names,
    calibration_link,
    load_builtin,
    load_scenario,
)
from .simulator import (
    CurveEstimate,
    SimConfig,
    SimTrace,
    estimate_cluster_existence,
    estimate_cluster_lifetime,
    estimate_link_duration,
    estimate_omega_stable,
    estimate_omega_stable_curve,
    simulate,
)
from .stability import (
    StabilityQuery,
    StabilityTables,
    omega_stable_enumerate,
    omega_stable_prob,
    omega_stable_prob_quadratic,
    omega_stable_tables,
    stable_paths,
)
from .stats import (
    ComparisonReport,
    compare_curve,
    compare_pmf,
    compare_scalar,
    empirical_mean,
    wilson_bounds,
    wilson_interval,
)
