"""Optimal assignment on a square cost matrix, plus a brute-force test oracle.

``solve`` implements the O(n^3) shortest-augmenting-path formulation with row
and column potentials. Two code paths share the algorithm: a plain-Python one
that is fastest for the small matrices the simulator solves thousands of
times, and a numpy-vectorized one for large matrices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from matchsim.domain import SkillVector, TaskSpec
from matchsim.errors import ContractViolation
from matchsim.feedback import NoiseModel, expected_reward, qualifies

# Below this size the interpreter loop beats numpy's per-call overhead.
_NUMPY_THRESHOLD = 64

_BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class Matching:
    """A minimum-cost perfect matching: ``assignment[row] = column``."""

    assignment: tuple[int, ...]
    total_cost: float


def _validated(costs) -> np.ndarray:
    c = np.asarray(costs, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
        raise ContractViolation(f"cost matrix must be square and non-empty, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ContractViolation("cost matrix entries must be finite")
    if np.any(c < 0):
        raise ContractViolation("cost matrix entries must be nonnegative")
    return c


def solve(costs) -> Matching:
    """Minimum-cost perfect matching of a square, finite, nonnegative matrix."""
    c = _validated(costs)
    n = c.shape[0]
    if n <= _NUMPY_THRESHOLD:
        assignment = _assign_python(c.tolist(), n)
    else:
        assignment = _assign_numpy(c, n)
    total = float(sum(c[i, assignment[i]] for i in range(n)))
    return Matching(assignment=tuple(assignment), total_cost=total)


def brute_force_solve(costs) -> Matching:
    """Exhaustive minimum over all n! permutations; refuses n > 8."""
    c = _validated(costs)
    n = c.shape[0]
    if n > _BRUTE_FORCE_LIMIT:
        raise ContractViolation(f"brute force refused for n={n} > {_BRUTE_FORCE_LIMIT}")
    best_perm: tuple[int, ...] | None = None
    best_cost = math.inf
    for perm in itertools.permutations(range(n)):
        cost = sum(c[i, perm[i]] for i in range(n))
        if cost < best_cost:
            best_cost = cost
            best_perm = perm
    assert best_perm is not None
    return Matching(assignment=best_perm, total_cost=float(best_cost))


def build_cost_matrix(
    skill_source: list[SkillVector],
    tasks: list[TaskSpec],
    noise: NoiseModel,
    rule: str = "componentwise",
) -> np.ndarray:
    """Cost of assigning each worker (row) to each task (column).

    The entry is ``1 - E[reward]`` under the rating model, so minimizing total
    cost maximizes expected reward while keeping all entries nonnegative.
    """
    rows = []
    for skills in skill_source:
        rows.append([1.0 - expected_reward(qualifies(skills, t, rule), noise) for t in tasks])
    return np.asarray(rows, dtype=float)


def pad_square(costs: np.ndarray, fill: float = 1.0) -> np.ndarray:
    """Pad a rectangular cost matrix with constant-cost dummy rows/columns."""
    rows, cols = costs.shape
    n = max(rows, cols)
    if rows == cols:
        return costs
    out = np.full((n, n), fill, dtype=float)
    out[:rows, :cols] = costs
    return out


def _assign_python(rows: list[list[float]], n: int) -> list[int]:
    inf = math.inf
    # Column 0 is a virtual column; p[j] is the row matched to column j.
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = rows[i0 - 1]
            base = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - base - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[p[j] - 1] = j - 1
    return assignment


def _assign_numpy(c: np.ndarray, n: int) -> list[int]:
    inf = np.inf
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, inf)
        used = np.zeros(n + 1, dtype=bool)
        minv_cols = minv[1:]
        way_cols = way[1:]
        while True:
            used[j0] = True
            i0 = int(p[j0])
            cur = c[i0 - 1] - u[i0] - v[1:]
            free = ~used[1:]
            better = free & (cur < minv_cols)
            minv_cols[better] = cur[better]
            way_cols[better] = j0
            candidates = np.where(free, minv_cols, inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]
            # Matched rows of used columns are pairwise distinct, so the
            # fancy-index update touches each potential once.
            u[p[used]] += delta
            v[used] -= delta
            minv_cols[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = int(way[j0])
            p[j0] = p[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[int(p[j]) - 1] = j - 1
    return assignment
