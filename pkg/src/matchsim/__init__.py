"""matchsim: learning-to-match simulation library and benchmark CLI."""

from matchsim.config import ExperimentConfig, parse_config, preset
from matchsim.domain import (
    LEVEL_GRID,
    AssignmentAction,
    ProblemInstance,
    TaskSpec,
    Worker,
    generate_instance,
    regenerate_workers,
    substream,
)
from matchsim.errors import ConfigError, ContractViolation
from matchsim.estimation import (
    AverageEstimate,
    SkillIntervalEstimate,
    average_point,
    average_update,
    minmax_point,
    minmax_update,
)
from matchsim.feedback import NoiseModel, RewardSample, draw_reward, expected_reward, qualifies
from matchsim.hungarian import Matching, brute_force_solve, build_cost_matrix, solve
from matchsim.policies import (
    BefParams,
    EpsilonGreedyParams,
    Policy,
    PolicySpec,
    make_policy,
)
from matchsim.simulator import (
    MetricSeries,
    RunTrace,
    percent_of_optimal,
    run_experiment,
    run_simulation,
    success_rate,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentAction",
    "AverageEstimate",
    "BefParams",
    "ConfigError",
    "ContractViolation",
    "EpsilonGreedyParams",
    "ExperimentConfig",
    "LEVEL_GRID",
    "Matching",
    "MetricSeries",
    "NoiseModel",
    "Policy",
    "PolicySpec",
    "ProblemInstance",
    "RewardSample",
    "RunTrace",
    "SkillIntervalEstimate",
    "TaskSpec",
    "Worker",
    "average_point",
    "average_update",
    "brute_force_solve",
    "build_cost_matrix",
    "draw_reward",
    "expected_reward",
    "generate_instance",
    "make_policy",
    "minmax_point",
    "minmax_update",
    "parse_config",
    "percent_of_optimal",
    "preset",
    "qualifies",
    "regenerate_workers",
    "run_experiment",
    "run_simulation",
    "solve",
    "substream",
    "success_rate",
]
