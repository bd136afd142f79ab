"""banditlab: a non-stationary multi-armed bandit laboratory.

Discounted Thompson sampling and its optimistic variant, six comparison
baselines, deterministic benchmark environments, a reproducible regret
harness, and an exact calculator for the probability of picking the
sub-optimal arm of a two-armed bandit.
"""

__version__ = "0.1.0"

from .config import ExperimentConfig, PolicySpec, parse_config_file, parse_config_text
from .environments import (
    AbruptSchedule,
    CustomSchedule,
    Schedule,
    SinusoidalSchedule,
    preset_environment,
)
from .errors import ConfigError, ConvergenceError, PrecisionError, PrecisionWarning
from .harness import (
    RegretCurve,
    RunTrajectory,
    aggregate,
    run_experiment,
    run_replications,
    run_single,
    sweep_arms,
    sweep_gamma,
)
from .hypergeom import SeriesControl, hyp2f1, hyp3f2_at_1, log_beta, log_gamma, pochhammer
from .policies import (
    ArmChoice,
    DiscountedPosterior,
    DiscountedThompson,
    DiscountedUcb,
    DynamicThompson,
    Exp3Ix,
    OraclePolicy,
    Policy,
    Rexp3,
    SlidingWindowUcb,
    binarize_reward,
    ducb_gamma,
    exp3ix_params,
    make_policy,
    rexp3_gamma,
    swucb_tau,
)
from .rng import (
    BetaParams,
    RngState,
    beta_mean,
    beta_variance,
    derive_substream,
    sample_bernoulli,
    sample_beta,
    sample_gamma,
)
from .suboptimal import (
    ProbQuery,
    beta0_condition_check,
    mc_prob_suboptimal,
    prob_suboptimal,
    ratio_density,
)

__all__ = [name for name in dir() if not name.startswith("_")]
