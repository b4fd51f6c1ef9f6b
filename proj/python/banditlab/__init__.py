"""Multi-user delayed-feedback bandit engine (Python front end)."""

from banditlab._core import (
    ConfigError,
    DelaySchedule,
    LossRealization,
    LossSpec,
    amud_epoch_checks,
    build_adversarial_env,
    config_defaults,
    constant_delays,
    emit_plot,
    known_policies,
    recommended_eta,
    run_config,
    run_episode,
    softmax_distribution,
    theorem1_bound,
    theorem2_bound,
    truncate_learning_rate,
    truncated_gaussian_mean,
    uniform_delays,
    uniform_segment_starts,
)

__all__ = [
    "ConfigError",
    "DelaySchedule",
    "LossRealization",
    "LossSpec",
    "amud_epoch_checks",
    "build_adversarial_env",
    "config_defaults",
    "constant_delays",
    "emit_plot",
    "known_policies",
    "recommended_eta",
    "run_config",
    "run_episode",
    "softmax_distribution",
    "theorem1_bound",
    "theorem2_bound",
    "truncate_learning_rate",
    "truncated_gaussian_mean",
    "uniform_delays",
    "uniform_segment_starts",
]
