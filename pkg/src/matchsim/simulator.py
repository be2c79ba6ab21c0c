"""Block-matching run loop, metrics, and multi-run experiment aggregation.

An experiment sweeps one axis (task count, or rating-noise level), holds the
task set fixed across runs per sweep point, regenerates workers every run,
and executes every policy on the identical instance with an independent
reward substream. The oracle's paired run on the same instance provides the
percent-of-optimal denominator; when the oracle is itself in the policy list
it IS that paired run, so its own ratio is exactly 100.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from matchsim.domain import (
    AssignmentAction,
    ProblemInstance,
    TaskSpec,
    generate_instance,
    regenerate_workers,
    substream,
)
from matchsim.errors import ConfigError, ContractViolation
from matchsim.feedback import NoiseModel, expected_reward, qualifies
from matchsim.policies import OraclePolicy, Policy, make_policy

MODES = ("block", "unrestricted")

# Stream purposes; combined with sweep-point values so that any sweep point's
# results are independent of which other points an experiment contains.
_STREAM_INSTANCE = 0
_STREAM_WORKERS = 1
_STREAM_ORACLE = 2
_STREAM_POLICY = 3


@dataclass
class RunTrace:
    """Everything recorded while one policy plays one run."""

    actions: list[AssignmentAction] = field(default_factory=list)
    rewards: list[int] = field(default_factory=list)
    qualified: list[bool] = field(default_factory=list)
    block_cumulative: list[int] = field(default_factory=list)

    @property
    def total_reward(self) -> int:
        return self.block_cumulative[-1] if self.block_cumulative else 0

    @property
    def assignment_count(self) -> int:
        return len(self.rewards)


@dataclass(frozen=True)
class MetricSeries:
    """One policy's curve over the sweep axis: mean and standard error per x."""

    name: str
    metric: str
    x: tuple[float, ...]
    mean: tuple[float, ...]
    stderr: tuple[float, ...]


def run_simulation(
    instance: ProblemInstance,
    policy: Policy,
    noise: NoiseModel,
    mode: str = "block",
    rng_seed: int | np.random.Generator = 0,
    rule: str = "componentwise",
) -> RunTrace:
    """Play one policy over the instance's task stream and record the trace.

    Block mode walks the tasks in blocks of the worker-pool size (a trailing
    partial block is dropped); unrestricted mode offers every task on its own,
    so one worker may serve many tasks.
    """
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    if instance.worker_count == 0 or instance.task_count == 0:
        raise ConfigError("empty instance")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else substream(rng_seed)

    if mode == "block":
        block_size = instance.worker_count
        block_count = instance.task_count // block_size
        blocks: Iterable[list[TaskSpec]] = (
            list(instance.tasks[k * block_size : (k + 1) * block_size])
            for k in range(block_count)
        )
    else:
        blocks = ([task] for task in instance.tasks)
        block_count = instance.task_count

    planned = block_count * (instance.worker_count if mode == "block" else 1)
    policy.begin_run(instance.worker_count, instance.skill_dims, planned)
    if isinstance(policy, OraclePolicy):
        policy.set_true_skills([w.true_skills for w in instance.workers])

    trace = RunTrace()
    workers = instance.workers
    tasks_by_id = {t.id: t for t in instance.tasks}
    total = 0
    for block in blocks:
        action = policy.choose_block(block, rng)
        action.validate(mode)
        if len(action.pairs) != len(block) or {t for _, t in action.pairs} != {
            t.id for t in block
        }:
            raise ContractViolation("action does not cover the task block exactly once")
        for worker_id, task_id in action.pairs:
            task = tasks_by_id[task_id]
            is_qualified = qualifies(workers[worker_id].true_skills, task, rule)
            reward = 1 if rng.random() < expected_reward(is_qualified, noise) else 0
            policy.observe(worker_id, task, reward)
            trace.rewards.append(reward)
            trace.qualified.append(is_qualified)
            total += reward
        trace.actions.append(action)
        trace.block_cumulative.append(total)
    return trace


def percent_of_optimal(policy_trace: RunTrace, oracle_trace: RunTrace) -> float:
    """Policy reward as a percentage of the paired oracle run's reward."""
    if policy_trace.assignment_count != oracle_trace.assignment_count:
        raise ContractViolation(
            f"trace lengths differ: {policy_trace.assignment_count} vs "
            f"{oracle_trace.assignment_count}"
        )
    if oracle_trace.total_reward == 0:
        return 100.0
    return 100.0 * policy_trace.total_reward / oracle_trace.total_reward


def success_rate(trace: RunTrace) -> float:
    """Percentage of assignments where the worker truly qualified."""
    if trace.assignment_count == 0:
        return 0.0
    return 100.0 * sum(trace.qualified) / trace.assignment_count


def realized_success_rate(trace: RunTrace) -> float:
    """Percentage of assignments whose rating came back positive."""
    if trace.assignment_count == 0:
        return 0.0
    return 100.0 * sum(trace.rewards) / trace.assignment_count


def _flip_key(flip_prob: float) -> int:
    return int(round(flip_prob * 1_000_000))


TraceObserver = Callable[[str, float, int, ProblemInstance, RunTrace], None]


def run_experiment(config, on_trace: TraceObserver | None = None) -> list[MetricSeries]:
    """Run the full protocol described by an ExperimentConfig.

    Returns one MetricSeries per configured policy, in configuration order.
    ``on_trace`` (mainly for tests) is called with every finished trace as
    ``(series_name, x_value, run_index, instance, trace)``.
    """
    if config.flip_probs is not None:
        points = [(config.task_counts[0], fp, float(fp)) for fp in config.flip_probs]
    else:
        points = [(tc, config.flip_prob, float(tc)) for tc in config.task_counts]

    labels = [spec.display_label for spec in config.policies]
    values: dict[str, list[list[float]]] = {lab: [] for lab in labels}

    for task_count, flip_prob, x_value in points:
        noise = NoiseModel(flip_prob)
        tck, fpk = task_count, _flip_key(flip_prob)
        # Tasks and workers are keyed without the noise level, so a noise sweep
        # compares all levels on identical instances (paired comparison).
        base = generate_instance(
            config.workers,
            task_count,
            config.skills,
            substream(config.seed, _STREAM_INSTANCE, tck),
        )
        needs_oracle = config.metric == "percent_of_optimal" or any(
            spec.kind == "oracle" for spec in config.policies
        )
        per_run: dict[str, list[float]] = {lab: [] for lab in labels}
        for run in range(config.runs):
            inst = regenerate_workers(base, substream(config.seed, _STREAM_WORKERS, tck, run))
            oracle_ref = None
            if needs_oracle:
                oracle_ref = run_simulation(
                    inst,
                    OraclePolicy(noise, rule=config.qualification),
                    noise,
                    config.mode,
                    substream(config.seed, _STREAM_ORACLE, tck, fpk, run),
                    config.qualification,
                )
            for idx, spec in enumerate(config.policies):
                if spec.kind == "oracle":
                    trace = oracle_ref
                else:
                    trace = run_simulation(
                        inst,
                        make_policy(spec, noise, config.qualification),
                        noise,
                        config.mode,
                        substream(config.seed, _STREAM_POLICY, tck, fpk, run, idx),
                        config.qualification,
                    )
                if config.metric == "percent_of_optimal":
                    value = percent_of_optimal(trace, oracle_ref)
                else:
                    value = success_rate(trace)
                per_run[labels[idx]].append(value)
                if on_trace is not None:
                    on_trace(labels[idx], x_value, run, inst, trace)
        for lab in labels:
            values[lab].append(per_run[lab])

    series = []
    for lab in labels:
        means = []
        errs = []
        for samples in values[lab]:
            arr = np.asarray(samples, dtype=float)
            means.append(float(arr.mean()))
            errs.append(float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0)
        series.append(
            MetricSeries(
                name=lab,
                metric=config.metric,
                x=tuple(x for _, _, x in points),
                mean=tuple(means),
                stderr=tuple(errs),
            )
        )
    return series
