"""The six assignment policies behind one block-choice interface.

Every policy owns its learning state (pull counts, reward sums, one skill
estimator per worker) and exposes two operations: ``choose_block`` picks a
bipartite assignment for a block of tasks, ``observe`` folds one rating back
into the state. Policies never see true skills; the oracle is the one
explicit exception and receives them from the simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from matchsim.domain import AssignmentAction, SkillVector, TaskSpec
from matchsim.errors import ConfigError, ContractViolation
from matchsim.estimation import (
    UPDATE_MODES,
    AverageEstimate,
    SkillIntervalEstimate,
    average_point,
    average_update,
    minmax_point,
    minmax_update,
)
from matchsim.feedback import NoiseModel, qualifies
from matchsim.hungarian import build_cost_matrix, pad_square, solve

POLICY_KINDS = ("oracle", "hme", "egreedy", "ucb", "bef", "random")
ESTIMATOR_KINDS = ("minmax", "average")

DEFAULT_LABELS = {
    "oracle": "Oracle",
    "hme": "HME",
    "egreedy": "Epsilon Greedy",
    "ucb": "UCB",
    "bef": "BEF",
    "random": "Random",
}


@dataclass(frozen=True)
class EpsilonGreedyParams:
    epsilon0: float = 0.2
    drop: float = 0.9

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ConfigError(f"policy.egreedy.epsilon0 must be in [0, 1], got {self.epsilon0}")
        if not 0.0 < self.drop <= 1.0:
            raise ConfigError(f"policy.egreedy.drop must be in (0, 1], got {self.drop}")


@dataclass(frozen=True)
class BefParams:
    explore_fraction: float = 0.1
    budget: float | None = None  # None: the run's total assignment count
    cost: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.explore_fraction <= 1.0:
            raise ConfigError(
                f"policy.bef.explore_fraction must be in [0, 1], got {self.explore_fraction}"
            )
        if self.budget is not None and self.budget <= 0:
            raise ConfigError(f"policy.bef.budget must be positive, got {self.budget}")
        if self.cost <= 0:
            raise ConfigError(f"policy.bef.cost must be positive, got {self.cost}")


@dataclass(frozen=True)
class PolicySpec:
    """Everything needed to build one policy instance for a run.

    The interval estimator defaults to ``reopen`` updates: the literal
    assignment rule keeps erasing what was already learned, and the purely
    monotone rule freezes every noise-corrupted bound forever, so neither
    sustains its matching quality over a long run under rating noise.
    """

    kind: str
    label: str | None = None
    estimator: str = "minmax"
    update_mode: str = "reopen"
    egreedy: EpsilonGreedyParams = field(default_factory=EpsilonGreedyParams)
    bef: BefParams = field(default_factory=BefParams)

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"policy kind must be one of {POLICY_KINDS}, got {self.kind!r}")
        if self.estimator not in ESTIMATOR_KINDS:
            raise ConfigError(
                f"estimator.kind must be one of {ESTIMATOR_KINDS}, got {self.estimator!r}"
            )
        if self.update_mode not in UPDATE_MODES:
            raise ConfigError(
                f"estimator.mode must be one of {UPDATE_MODES}, got {self.update_mode!r}"
            )

    @property
    def display_label(self) -> str:
        return self.label if self.label is not None else DEFAULT_LABELS[self.kind]


class Policy:
    """Base class: counters plus one estimator per worker."""

    def __init__(
        self,
        estimator: str = "minmax",
        update_mode: str = "overwrite",
        rule: str = "componentwise",
    ) -> None:
        self.estimator_kind = estimator
        self.update_mode = update_mode
        self.rule = rule
        self.worker_count = 0
        self.skill_dims = 0
        self.n = 0
        self.pulls: list[int] = []
        self.reward_sums: list[int] = []
        self._intervals: list[SkillIntervalEstimate] = []
        self._averages: list[AverageEstimate] = []

    def begin_run(self, worker_count: int, skill_dims: int, planned_assignments: int) -> None:
        """Reset all learning state for a fresh simulation run."""
        self.worker_count = worker_count
        self.skill_dims = skill_dims
        self.n = 0
        self.pulls = [0] * worker_count
        self.reward_sums = [0] * worker_count
        if self.estimator_kind == "minmax":
            self._intervals = [SkillIntervalEstimate.initial(skill_dims) for _ in range(worker_count)]
            self._averages = []
        else:
            self._averages = [AverageEstimate.initial(skill_dims) for _ in range(worker_count)]
            self._intervals = []

    def estimates(self) -> list[SkillVector]:
        """Current point estimate of every worker's skill vector."""
        if self.estimator_kind == "minmax":
            return [minmax_point(e) for e in self._intervals]
        return [average_point(e) for e in self._averages]

    def observe(self, worker_id: int, task: TaskSpec, reward: int) -> None:
        """Fold one binary rating into counters and the worker's estimator."""
        if not 0 <= worker_id < self.worker_count:
            raise ContractViolation(f"unknown worker id {worker_id}")
        self.n += 1
        self.pulls[worker_id] += 1
        self.reward_sums[worker_id] += reward
        if self.estimator_kind == "minmax":
            self._intervals[worker_id] = minmax_update(
                self._intervals[worker_id], task, reward, self.update_mode
            )
        else:
            self._averages[worker_id] = average_update(self._averages[worker_id], reward)

    def choose_block(
        self, task_block: list[TaskSpec], rng: np.random.Generator
    ) -> AssignmentAction:
        raise NotImplementedError

    def _check_block(self, task_block: list[TaskSpec]) -> None:
        if not task_block:
            raise ContractViolation("empty task block")
        if len(task_block) > self.worker_count:
            raise ContractViolation(
                f"block of {len(task_block)} tasks exceeds {self.worker_count} workers"
            )

    def _hungarian_pairs(
        self, skill_source: list[SkillVector], task_block: list[TaskSpec], noise: NoiseModel
    ) -> AssignmentAction:
        """Min-cost matching of workers to the block, dummy-padded when the
        block is smaller than the pool (dummies carry the worst cost, 1)."""
        costs = build_cost_matrix(skill_source, task_block, noise, self.rule)
        if costs.shape[0] != costs.shape[1]:
            costs = pad_square(costs, fill=1.0)
        matching = solve(costs)
        block_size = len(task_block)
        by_column: dict[int, int] = {}
        for worker, column in enumerate(matching.assignment):
            if column < block_size:
                by_column[column] = worker
        pairs = tuple((by_column[k], task_block[k].id) for k in range(block_size))
        return AssignmentAction(pairs=pairs)

    def _random_pairs(
        self, task_block: list[TaskSpec], rng: np.random.Generator
    ) -> AssignmentAction:
        perm = rng.permutation(self.worker_count)
        pairs = tuple((int(perm[k]), task.id) for k, task in enumerate(task_block))
        return AssignmentAction(pairs=pairs)


class OraclePolicy(Policy):
    """Hungarian matching on the true (hidden) skills; the 100% reference."""

    def __init__(self, noise: NoiseModel, **kwargs) -> None:
        super().__init__(**kwargs)
        self.noise = noise
        self._true_skills: list[SkillVector] = []

    def set_true_skills(self, skills: list[SkillVector]) -> None:
        self._true_skills = list(skills)

    def choose_block(self, task_block, rng) -> AssignmentAction:
        self._check_block(task_block)
        if len(self._true_skills) != self.worker_count:
            raise ContractViolation("oracle has no true skills for this run")
        return self._hungarian_pairs(self._true_skills, task_block, self.noise)


def _belief_noise(noise: NoiseModel) -> NoiseModel:
    """The cost model of a learning policy.

    A learner only sees binary ratings and cannot tell an inverted channel
    from an informative one, so its costs always assume qualification is
    worth seeking: the believed flip probability is min(p, 1 - p).
    """
    p = noise.flip_prob
    return noise if p <= 0.5 else NoiseModel(1.0 - p)


class HmePolicy(Policy):
    """Hungarian matching on the current point estimates."""

    def __init__(self, noise: NoiseModel, **kwargs) -> None:
        super().__init__(**kwargs)
        self.noise = _belief_noise(noise)

    def choose_block(self, task_block, rng) -> AssignmentAction:
        self._check_block(task_block)
        return self._hungarian_pairs(self.estimates(), task_block, self.noise)


class EpsilonGreedyPolicy(Policy):
    """Estimated-cost matching, with a decaying chance of a random block."""

    def __init__(self, noise: NoiseModel, params: EpsilonGreedyParams, **kwargs) -> None:
        super().__init__(**kwargs)
        self.noise = _belief_noise(noise)
        self.params = params
        self.epsilon = params.epsilon0

    def begin_run(self, worker_count, skill_dims, planned_assignments) -> None:
        super().begin_run(worker_count, skill_dims, planned_assignments)
        self.epsilon = self.params.epsilon0

    def choose_block(self, task_block, rng) -> AssignmentAction:
        self._check_block(task_block)
        # The epsilon == 0 case must not consume a draw, so that a zero-epsilon
        # policy replays exactly like plain estimated matching on a shared seed.
        explore = self.epsilon > 0.0 and rng.random() < self.epsilon
        if explore:
            action = self._random_pairs(task_block, rng)
        else:
            action = self._hungarian_pairs(self.estimates(), task_block, self.noise)
        self.epsilon *= self.params.drop
        return action


class UcbPolicy(Policy):
    """Optimism-driven selection on per-worker indices.

    The index is the worker's mean reward plus sqrt(2 ln n / n_w); untried
    workers rank first. Because the index does not depend on the task, the
    min-cost matching on negated indices is exactly "take the highest-index
    workers", which is how it is computed; ties go to the lower worker id so
    that single-task blocks reduce to textbook UCB1 arm selection.
    """

    def index(self, worker_id: int) -> float:
        pulled = self.pulls[worker_id]
        if pulled == 0:
            return math.inf
        return self.reward_sums[worker_id] / pulled + math.sqrt(2.0 * math.log(self.n) / pulled)

    def choose_block(self, task_block, rng) -> AssignmentAction:
        self._check_block(task_block)
        order = sorted(range(self.worker_count), key=lambda w: (-self.index(w), w))
        pairs = tuple((order[k], task.id) for k, task in enumerate(task_block))
        return AssignmentAction(pairs=pairs)


class BefPolicy(Policy):
    """Two-phase budgeted policy: uniform exploration, then density greedy.

    While spent budget is below ``explore_fraction * budget`` workers are
    assigned round-robin. Afterwards tasks are served most-demanding first
    and each receives the densest still-free worker whose point estimate
    meets its requirements; when no estimate qualifies (and always with the
    average estimator, whose scalar rating rate says nothing about meeting
    per-dimension requirements) the densest free worker is taken outright.
    """

    def __init__(self, params: BefParams, **kwargs) -> None:
        super().__init__(**kwargs)
        self.params = params
        self.spent = 0.0
        self.budget = 0.0
        self._rr_counter = 0

    def begin_run(self, worker_count, skill_dims, planned_assignments) -> None:
        super().begin_run(worker_count, skill_dims, planned_assignments)
        self.spent = 0.0
        self._rr_counter = 0
        if self.params.budget is not None:
            self.budget = float(self.params.budget)
        else:
            self.budget = planned_assignments * self.params.cost

    @property
    def remaining_budget(self) -> float:
        return self.budget - self.spent

    def density(self, worker_id: int) -> float:
        levels = (
            minmax_point(self._intervals[worker_id])
            if self.estimator_kind == "minmax"
            else average_point(self._averages[worker_id])
        )
        scalar = sum(levels) / len(levels)
        return scalar / self.params.cost

    def choose_block(self, task_block, rng) -> AssignmentAction:
        self._check_block(task_block)
        explore_budget = self.params.explore_fraction * self.budget
        cost = self.params.cost
        planned = self.spent
        chosen: dict[int, int] = {}  # block position -> worker id
        positions = list(range(len(task_block)))
        for k in positions:
            if planned < explore_budget:
                chosen[k] = self._rr_counter % self.worker_count
                self._rr_counter += 1
                planned += cost
            else:
                break
        remaining = [k for k in positions if k not in chosen]
        if remaining:
            remaining.sort(key=lambda k: (tuple(task_block[k].requirements), -k), reverse=True)
            free = sorted(
                (w for w in range(self.worker_count) if w not in chosen.values()),
                key=lambda w: (-self.density(w), w),
            )
            estimates = self.estimates() if self.estimator_kind == "minmax" else None
            for k in remaining:
                pick = None
                if estimates is not None:
                    task = task_block[k]
                    for w in free:
                        if qualifies(estimates[w], task, self.rule):
                            pick = w
                            break
                    if pick is None:
                        # Nobody is believed to qualify: spend the least dense
                        # worker and keep the strong ones for feasible tasks.
                        pick = free[-1]
                else:
                    pick = free[0]
                free.remove(pick)
                chosen[k] = pick
        pairs = tuple((chosen[k], task_block[k].id) for k in positions)
        return AssignmentAction(pairs=pairs)

    def observe(self, worker_id, task, reward) -> None:
        super().observe(worker_id, task, reward)
        self.spent += self.params.cost


class RandomPolicy(Policy):
    """Uniformly random bipartite assignment; the no-learning floor."""

    def choose_block(self, task_block, rng) -> AssignmentAction:
        self._check_block(task_block)
        return self._random_pairs(task_block, rng)


def make_policy(spec: PolicySpec, noise: NoiseModel, rule: str = "componentwise") -> Policy:
    """Build a fresh policy instance from its spec."""
    common = dict(estimator=spec.estimator, update_mode=spec.update_mode, rule=rule)
    if spec.kind == "oracle":
        return OraclePolicy(noise, **common)
    if spec.kind == "hme":
        return HmePolicy(noise, **common)
    if spec.kind == "egreedy":
        return EpsilonGreedyPolicy(noise, spec.egreedy, **common)
    if spec.kind == "ucb":
        return UcbPolicy(**common)
    if spec.kind == "bef":
        return BefPolicy(spec.bef, **common)
    if spec.kind == "random":
        return RandomPolicy(**common)
    raise ConfigError(f"unknown policy kind {spec.kind!r}")
