"""Skill estimators driven by binary ratings.

Two estimators are provided: an interval estimator that tracks a lower and an
upper bound per skill dimension and reports their midpoint, and a baseline
that averages all ratings into one shared level.

The interval estimator supports three update disciplines:

* ``overwrite``: a positive rating sets each lower bound to the task's
  requirement and a negative rating sets each upper bound to it,
  unconditionally. This is the literal update rule; under noise it can move
  a bound backwards and even invert the interval (tolerated; the midpoint
  stays well-defined).
* ``monotone``: bounds only tighten. Stable when ratings are exact, but a
  single flipped rating is locked in forever.
* ``reopen``: bounds tighten as in ``monotone``, but a rating that
  contradicts the current interval (a success above the upper bound, or a
  failure below the lower bound) reopens the contradicted bound to its
  prior extreme. With exact ratings this behaves like ``monotone``; under
  noise it recovers from corrupted bounds instead of freezing them.
"""

from __future__ import annotations

from dataclasses import dataclass

from matchsim.domain import SkillVector, TaskSpec
from matchsim.errors import ConfigError, ContractViolation

UPDATE_MODES = ("overwrite", "monotone", "reopen")


@dataclass(frozen=True)
class SkillIntervalEstimate:
    """Per-dimension [lower, upper] bounds on a worker's skill levels."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @classmethod
    def initial(cls, dims: int) -> "SkillIntervalEstimate":
        return cls(lower=(0.0,) * dims, upper=(1.0,) * dims)


@dataclass(frozen=True)
class AverageEstimate:
    """Running average of all ratings, applied identically to every dimension."""

    sum_of_ratings: float
    rating_count: int
    dims: int

    @classmethod
    def initial(cls, dims: int) -> "AverageEstimate":
        return cls(sum_of_ratings=0.0, rating_count=0, dims=dims)


def minmax_update(
    est: SkillIntervalEstimate,
    task: TaskSpec,
    reward: int,
    mode: str = "overwrite",
) -> SkillIntervalEstimate:
    """Fold one rating into the interval bounds (disciplines: module docstring)."""
    reqs = task.requirements
    if len(est.lower) != len(reqs):
        raise ContractViolation(
            f"dimension mismatch: {len(est.lower)} bounds vs {len(reqs)} requirements"
        )
    if mode not in UPDATE_MODES:
        raise ConfigError(f"estimator.mode must be one of {UPDATE_MODES}, got {mode!r}")

    if reward:
        if mode == "overwrite":
            lower = reqs
            upper = est.upper
        else:
            lower = tuple(max(lo, r) for lo, r in zip(est.lower, reqs))
            if mode == "reopen":
                upper = tuple(1.0 if r > up else up for r, up in zip(reqs, est.upper))
            else:
                upper = est.upper
        return SkillIntervalEstimate(lower=lower, upper=upper)
    if mode == "overwrite":
        upper = reqs
        lower = est.lower
    else:
        upper = tuple(min(up, r) for up, r in zip(est.upper, reqs))
        if mode == "reopen":
            lower = tuple(0.0 if r < lo else lo for r, lo in zip(reqs, est.lower))
        else:
            lower = est.lower
    return SkillIntervalEstimate(lower=lower, upper=upper)


def minmax_point(est: SkillIntervalEstimate) -> SkillVector:
    """Midpoint of the interval in every dimension."""
    return tuple((lo + up) / 2.0 for lo, up in zip(est.lower, est.upper))


def average_update(est: AverageEstimate, reward: int) -> AverageEstimate:
    """Fold one rating into the shared running average."""
    return AverageEstimate(
        sum_of_ratings=est.sum_of_ratings + reward,
        rating_count=est.rating_count + 1,
        dims=est.dims,
    )


def average_point(est: AverageEstimate) -> SkillVector:
    """The shared average as a level per dimension; 0.5 before any rating."""
    if est.rating_count == 0:
        return (0.5,) * est.dims
    return (est.sum_of_ratings / est.rating_count,) * est.dims
