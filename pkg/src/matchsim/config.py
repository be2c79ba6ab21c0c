"""Experiment configuration: flat key namespace, JSON files, and presets.

Config files are JSON objects with dotted keys (e.g. ``noise.flip_prob``).
CLI flags override file values, which override preset or built-in defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from matchsim.errors import ConfigError
from matchsim.feedback import QUALIFICATION_RULES
from matchsim.policies import (
    ESTIMATOR_KINDS,
    POLICY_KINDS,
    BefParams,
    EpsilonGreedyParams,
    PolicySpec,
)

OUTPUT_FORMATS = ("csv", "json", "coords")

PRESET_NAMES = ("fig1", "fig2", "fig3")

_DEFAULT_POLICY_ORDER = ("oracle", "hme", "ucb", "egreedy", "bef", "random")

KNOWN_KEYS = (
    "workers",
    "tasks",
    "runs",
    "skills",
    "seed",
    "metric",
    "mode",
    "qualification",
    "format",
    "noise.flip_prob",
    "noise.flip_probs",
    "estimator.kind",
    "estimator.mode",
    "policies",
    "policy.kind",
    "policy.egreedy.epsilon0",
    "policy.egreedy.drop",
    "policy.bef.explore_fraction",
    "policy.bef.budget",
    "policy.bef.cost",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment."""

    workers: int = 10
    task_counts: tuple[int, ...] = (300,)
    runs: int = 25
    skills: int = 3
    flip_prob: float = 0.15
    flip_probs: tuple[float, ...] | None = None
    metric: str = "percent_of_optimal"
    mode: str = "block"
    qualification: str = "ordered"
    seed: int = 0
    output_format: str = "csv"
    policies: tuple[PolicySpec, ...] = tuple(
        PolicySpec(kind) for kind in _DEFAULT_POLICY_ORDER
    )

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")
        if self.runs < 1:
            raise ConfigError(f"runs: must be >= 1, got {self.runs}")
        if self.skills < 1:
            raise ConfigError(f"skills: must be >= 1, got {self.skills}")
        if not self.task_counts:
            raise ConfigError("tasks: need at least one task count")
        for tc in self.task_counts:
            if tc < self.workers:
                raise ConfigError(
                    f"tasks: each task count must be >= workers ({self.workers}), got {tc}"
                )
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ConfigError(f"noise.flip_prob: must be in [0, 1], got {self.flip_prob}")
        if self.flip_probs is not None:
            for fp in self.flip_probs:
                if not 0.0 <= fp <= 1.0:
                    raise ConfigError(f"noise.flip_probs: must be in [0, 1], got {fp}")
            if len(self.task_counts) != 1:
                raise ConfigError(
                    "noise.flip_probs: a noise sweep needs exactly one task count"
                )
        if self.metric not in ("percent_of_optimal", "success_rate"):
            raise ConfigError(
                f"metric: must be percent_of_optimal or success_rate, got {self.metric!r}"
            )
        if self.mode not in ("block", "unrestricted"):
            raise ConfigError(f"mode: must be block or unrestricted, got {self.mode!r}")
        if self.qualification not in QUALIFICATION_RULES:
            raise ConfigError(
                f"qualification: must be one of {QUALIFICATION_RULES}, got {self.qualification!r}"
            )
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(
                f"format: must be one of {OUTPUT_FORMATS}, got {self.output_format!r}"
            )
        if not self.policies:
            raise ConfigError("policies: need at least one policy")
        labels = [spec.display_label for spec in self.policies]
        if any(label == "" for label in labels):
            raise ConfigError("policies: empty series label")
        if len(set(labels)) != len(labels):
            raise ConfigError(f"policies: duplicate series labels in {labels}")


def preset(name: str, seed: int = 0) -> ExperimentConfig:
    """Named experiment configurations reproducing the benchmark figures."""
    xs = tuple(range(10, 301, 10))
    if name == "fig1":
        return ExperimentConfig(
            task_counts=xs,
            metric="percent_of_optimal",
            seed=seed,
            policies=(
                PolicySpec(kind="bef", label="min-max", estimator="minmax"),
                PolicySpec(kind="bef", label="average", estimator="average"),
            ),
        )
    if name == "fig2":
        # 1000 tasks so the learned phase dominates the run average.
        return ExperimentConfig(
            task_counts=(1000,),
            flip_probs=tuple(i / 10 for i in range(11)),
            metric="success_rate",
            seed=seed,
            policies=(PolicySpec(kind="hme"),),
        )
    if name == "fig3":
        return ExperimentConfig(
            task_counts=xs,
            metric="percent_of_optimal",
            seed=seed,
            policies=tuple(PolicySpec(kind) for kind in _DEFAULT_POLICY_ORDER),
        )
    raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")


def _require_int(key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _require_number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _require_str(key: str, value, allowed: tuple[str, ...]) -> str:
    if not isinstance(value, str) or value not in allowed:
        raise ConfigError(f"{key}: must be one of {allowed}, got {value!r}")
    return value


def _parse_task_counts(value) -> tuple[int, ...]:
    if isinstance(value, int) and not isinstance(value, bool):
        return (value,)
    if isinstance(value, (list, tuple)):
        return tuple(_require_int("tasks", v) for v in value)
    raise ConfigError(f"tasks: expected an integer or list of integers, got {value!r}")


def _parse_policy_kinds(value) -> tuple[str, ...]:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"policies: expected a non-empty list of kinds, got {value!r}")
    kinds = []
    for v in value:
        if not isinstance(v, str) or v not in POLICY_KINDS:
            raise ConfigError(f"policies: must be one of {POLICY_KINDS}, got {v!r}")
        kinds.append(v)
    if len(set(kinds)) != len(kinds):
        raise ConfigError(f"policies: duplicate kinds in {kinds}")
    return tuple(kinds)


def load_config_file(path: str | Path) -> dict:
    """Read and minimally check a JSON config file."""
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {p} must hold a JSON object")
    return data


def parse_config(
    path: str | Path | None = None,
    overrides: dict | None = None,
    base: ExperimentConfig | None = None,
) -> ExperimentConfig:
    """Combine defaults (or a preset base), a config file, and overrides.

    Later sources win. Unknown keys and out-of-range values raise
    ``ConfigError`` naming the offending key.
    """
    merged: dict = {}
    if path is not None:
        merged.update(load_config_file(path))
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    for key in merged:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")

    cfg = base if base is not None else ExperimentConfig()
    fields: dict = {}
    if "workers" in merged:
        fields["workers"] = _require_int("workers", merged["workers"])
    if "tasks" in merged:
        fields["task_counts"] = _parse_task_counts(merged["tasks"])
    if "runs" in merged:
        fields["runs"] = _require_int("runs", merged["runs"])
    if "skills" in merged:
        fields["skills"] = _require_int("skills", merged["skills"])
    if "seed" in merged:
        fields["seed"] = _require_int("seed", merged["seed"])
    if "metric" in merged:
        fields["metric"] = _require_str(
            "metric", merged["metric"], ("percent_of_optimal", "success_rate")
        )
    if "mode" in merged:
        fields["mode"] = _require_str("mode", merged["mode"], ("block", "unrestricted"))
    if "qualification" in merged:
        fields["qualification"] = _require_str(
            "qualification", merged["qualification"], QUALIFICATION_RULES
        )
    if "format" in merged:
        fields["output_format"] = _require_str("format", merged["format"], OUTPUT_FORMATS)
    if "noise.flip_prob" in merged:
        fields["flip_prob"] = _require_number("noise.flip_prob", merged["noise.flip_prob"])
    if "noise.flip_probs" in merged:
        value = merged["noise.flip_probs"]
        if value is None:
            fields["flip_probs"] = None
        elif isinstance(value, (list, tuple)) and value:
            fields["flip_probs"] = tuple(
                _require_number("noise.flip_probs", v) for v in value
            )
        else:
            raise ConfigError(
                f"noise.flip_probs: expected a non-empty list of numbers, got {value!r}"
            )

    # Policy-related keys rebuild the policy spec list on top of the base list.
    estimator = merged.get("estimator.kind")
    if estimator is not None:
        _require_str("estimator.kind", estimator, ESTIMATOR_KINDS)
    update_mode = merged.get("estimator.mode")
    if update_mode is not None:
        _require_str("estimator.mode", update_mode, ("overwrite", "monotone"))

    eg_fields: dict = {}
    if "policy.egreedy.epsilon0" in merged:
        eg_fields["epsilon0"] = _require_number(
            "policy.egreedy.epsilon0", merged["policy.egreedy.epsilon0"]
        )
    if "policy.egreedy.drop" in merged:
        eg_fields["drop"] = _require_number("policy.egreedy.drop", merged["policy.egreedy.drop"])
    bef_fields: dict = {}
    if "policy.bef.explore_fraction" in merged:
        bef_fields["explore_fraction"] = _require_number(
            "policy.bef.explore_fraction", merged["policy.bef.explore_fraction"]
        )
    if "policy.bef.budget" in merged:
        value = merged["policy.bef.budget"]
        bef_fields["budget"] = None if value is None else _require_number(
            "policy.bef.budget", value
        )
    if "policy.bef.cost" in merged:
        bef_fields["cost"] = _require_number("policy.bef.cost", merged["policy.bef.cost"])

    specs = list(cfg.policies)
    if "policies" in merged and "policy.kind" in merged:
        raise ConfigError("policies and policy.kind are mutually exclusive")
    if "policies" in merged:
        kinds = _parse_policy_kinds(merged["policies"])
        specs = [PolicySpec(kind) for kind in kinds]
    elif "policy.kind" in merged:
        kind = merged["policy.kind"]
        if not isinstance(kind, str) or kind not in POLICY_KINDS:
            raise ConfigError(f"policy.kind: must be one of {POLICY_KINDS}, got {kind!r}")
        specs = [PolicySpec(kind)]
    if estimator is not None or update_mode is not None or eg_fields or bef_fields:
        rebuilt = []
        for spec in specs:
            changes: dict = {}
            if estimator is not None:
                changes["estimator"] = estimator
            if update_mode is not None:
                changes["update_mode"] = update_mode
            if eg_fields:
                changes["egreedy"] = replace(spec.egreedy, **eg_fields)
            if bef_fields:
                changes["bef"] = replace(spec.bef, **bef_fields)
            rebuilt.append(replace(spec, **changes))
        specs = rebuilt
    fields["policies"] = tuple(specs)

    return replace(cfg, **fields)
