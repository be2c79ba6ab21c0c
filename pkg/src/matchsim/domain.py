"""Core value types for workers, tasks and assignments, plus the synthetic generator.

All skill and requirement levels live on a fixed six-point grid. Generated
levels are taken from the literal ``LEVEL_GRID`` tuple, so equal levels are
bit-identical floats and ``>=`` comparisons between them are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from matchsim.errors import ConfigError, ContractViolation

LEVEL_GRID: tuple[float, ...] = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

SkillVector = tuple[float, ...]


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Return an independent, reproducible generator for the given stream key.

    Streams are derived from the master seed via ``SeedSequence`` spawn keys,
    so any (purpose, index...) tuple names the same stream regardless of the
    order streams are created in.
    """
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(seq))


def _as_generator(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class TaskSpec:
    """A task with one known requirement level per skill dimension."""

    id: int
    requirements: SkillVector

    def __post_init__(self) -> None:
        if not all(0.0 <= r <= 1.0 for r in self.requirements):
            raise ContractViolation(f"task {self.id}: requirements outside [0, 1]")


@dataclass(frozen=True)
class Worker:
    """A worker whose true skill levels are hidden from every learning policy."""

    id: int
    true_skills: SkillVector

    def __post_init__(self) -> None:
        if not all(0.0 <= s <= 1.0 for s in self.true_skills):
            raise ContractViolation(f"worker {self.id}: skills outside [0, 1]")


@dataclass(frozen=True)
class AssignmentAction:
    """One round of (worker id, task id) assignments."""

    pairs: tuple[tuple[int, int], ...]

    def validate(self, mode: str = "block") -> None:
        """Check the pairing discipline: tasks never repeat; workers only may
        repeat in unrestricted mode."""
        tasks = [t for _, t in self.pairs]
        if len(set(tasks)) != len(tasks):
            raise ContractViolation("a task appears in more than one assignment")
        if mode == "block":
            workers = [w for w, _ in self.pairs]
            if len(set(workers)) != len(workers):
                raise ContractViolation("a worker appears twice in a block assignment")


@dataclass(frozen=True)
class ProblemInstance:
    """A fixed pool of workers and an ordered stream of tasks."""

    workers: tuple[Worker, ...]
    tasks: tuple[TaskSpec, ...]
    skill_dims: int

    def __post_init__(self) -> None:
        if len(self.tasks) < len(self.workers):
            raise ConfigError(
                f"task count {len(self.tasks)} < worker count {len(self.workers)}"
            )

    @property
    def worker_count(self) -> int:
        return len(self.workers)

    @property
    def task_count(self) -> int:
        return len(self.tasks)


def _draw_level_vectors(rng: np.random.Generator, count: int, dims: int) -> list[SkillVector]:
    idx = rng.integers(0, len(LEVEL_GRID), size=(count, dims))
    return [tuple(LEVEL_GRID[i] for i in row) for row in idx]


def generate_instance(
    worker_count: int,
    task_count: int,
    skill_dims: int,
    rng_seed: int | np.random.Generator,
) -> ProblemInstance:
    """Sample a fresh problem: all levels uniform on the six-point grid.

    Workers are drawn first, then tasks, so a fixed seed gives a bit-exact
    reproducible instance.
    """
    if worker_count < 1:
        raise ConfigError(f"worker_count must be >= 1, got {worker_count}")
    if task_count < worker_count:
        raise ConfigError(
            f"task_count must be >= worker_count, got {task_count} < {worker_count}"
        )
    if skill_dims < 1:
        raise ConfigError(f"skill_dims must be >= 1, got {skill_dims}")

    rng = _as_generator(rng_seed)
    workers = tuple(
        Worker(id=i, true_skills=levels)
        for i, levels in enumerate(_draw_level_vectors(rng, worker_count, skill_dims))
    )
    tasks = tuple(
        TaskSpec(id=j, requirements=levels)
        for j, levels in enumerate(_draw_level_vectors(rng, task_count, skill_dims))
    )
    return ProblemInstance(workers=workers, tasks=tasks, skill_dims=skill_dims)


def regenerate_workers(
    instance: ProblemInstance, rng_seed: int | np.random.Generator
) -> ProblemInstance:
    """Return a copy of the instance with the same tasks and freshly drawn workers."""
    rng = _as_generator(rng_seed)
    workers = tuple(
        Worker(id=i, true_skills=levels)
        for i, levels in enumerate(
            _draw_level_vectors(rng, instance.worker_count, instance.skill_dims)
        )
    )
    return ProblemInstance(workers=workers, tasks=instance.tasks, skill_dims=instance.skill_dims)
