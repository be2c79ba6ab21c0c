"""The environment's rating model: qualification test and noisy binary rewards.

Two qualification rules are supported. ``componentwise`` demands that every
skill level meets the corresponding requirement level. ``ordered`` compares
the two vectors as sequences (first differing dimension decides), which makes
qualification a total order on workers and tasks; the benchmark presets use
this rule because it reproduces the reference results. The employer's rating
is the qualification bit passed through a binary symmetric channel with flip
probability ``flip_prob``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from matchsim.domain import SkillVector, TaskSpec
from matchsim.errors import ConfigError, ContractViolation

QUALIFICATION_RULES = ("componentwise", "ordered")


@dataclass(frozen=True)
class NoiseModel:
    """Rating noise: the probability that a rating contradicts the truth."""

    flip_prob: float = 0.15

    def __post_init__(self) -> None:
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ContractViolation(f"flip_prob must be in [0, 1], got {self.flip_prob}")


@dataclass(frozen=True)
class RewardSample:
    """One realized binary rating for a (worker, task) assignment."""

    value: int
    worker_id: int
    task_id: int


def _check_dims(skills: SkillVector, reqs: SkillVector) -> None:
    if len(skills) != len(reqs):
        raise ContractViolation(
            f"dimension mismatch: {len(skills)} skills vs {len(reqs)} requirements"
        )


def qualifies(skills: SkillVector, task: TaskSpec, rule: str = "componentwise") -> bool:
    """True iff the worker meets the task's requirements under the given rule."""
    reqs = task.requirements
    _check_dims(skills, reqs)
    if rule == "componentwise":
        for s, r in zip(skills, reqs):
            if s < r:
                return False
        return True
    if rule == "ordered":
        return tuple(skills) >= tuple(reqs)
    raise ConfigError(f"qualification rule must be one of {QUALIFICATION_RULES}, got {rule!r}")


def expected_reward(qualified: bool, noise: NoiseModel) -> float:
    """Mean of the rating distribution for a (non-)qualified assignment."""
    return 1.0 - noise.flip_prob if qualified else noise.flip_prob


def draw_reward(
    skills: SkillVector,
    task: TaskSpec,
    noise: NoiseModel,
    rng: np.random.Generator,
    worker_id: int = -1,
    rule: str = "componentwise",
) -> RewardSample:
    """Draw one rating: Bernoulli(1 - flip_prob) if qualified, else Bernoulli(flip_prob)."""
    p = expected_reward(qualifies(skills, task, rule), noise)
    value = 1 if rng.random() < p else 0
    return RewardSample(value=value, worker_id=worker_id, task_id=task.id)
