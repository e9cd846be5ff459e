"""Median-clipped zeroth-order optimization and heavy-tailed bandits."""

__version__ = "0.1.0"

from .bandit import (
    BanditEnvironment,
    BanditSchedule,
    bandit_block_step,
    importance_weighted,
    run_bandit,
    run_full_feedback,
    theorem_schedule,
)
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    NumericalError,
    ParameterError,
    ScheduleError,
)
from .estimator import (
    GradientSample,
    MedianEstimatorConfig,
    batch_median_estimate,
    clip,
    dual_norm_factor,
    median_estimate,
    median_size_for,
    sample_unit_sphere,
    sigma_bound,
    two_point_estimate,
)
from .geometry import (
    BallSetup,
    EntropySetup,
    FeasibleSet,
    TsallisSetup,
    make_setup,
)
from .noise import (
    CauchyNoise,
    GaussianNoise,
    IndependentOracle,
    LevyStableNoise,
    LipschitzOracle,
    MixtureNoise,
    TailSpec,
    ZeroNoise,
    sample_cauchy,
    sample_levy_stable,
    sample_mixture,
)
from .problems import make_least_squares, make_linear, make_strongly_convex
from .solvers import (
    RunRecord,
    SgdParams,
    SolverSchedule,
    SstmState,
    run_restarted,
    run_sgd_baseline,
    run_smd,
    run_sstm,
    smd_step,
    sstm_step,
)
