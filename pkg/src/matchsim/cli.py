"""Command-line front end: run experiments, presets, sweeps, and one-shot solves.

Exit codes: 0 on success, 2 for configuration errors, 3 for runtime contract
violations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from matchsim.config import (
    KNOWN_KEYS,
    PRESET_NAMES,
    ExperimentConfig,
    parse_config,
    preset,
)
from matchsim.errors import ConfigError, ContractViolation
from matchsim.hungarian import solve
from matchsim.reporting import emit_results
from matchsim.simulator import MetricSeries, run_experiment

_SEED_ENV = "MATCH_SEED"


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON config file")
    p.add_argument("--seed", type=int, metavar="N", help="master seed")
    p.add_argument("--runs", type=int, metavar="N", help="runs per sweep point")
    p.add_argument("--workers", type=int, metavar="N", help="worker pool size")
    p.add_argument("--tasks", metavar="N[,N,...]", help="task count(s)")
    p.add_argument("--skills", type=int, metavar="N", help="skill dimensions")
    p.add_argument("--flip-prob", type=float, metavar="X", help="rating flip probability")
    p.add_argument("--policies", metavar="LIST", help="comma-separated policy kinds")
    p.add_argument("--format", choices=("csv", "json", "coords"), help="output format")
    p.add_argument("--out", metavar="PATH", help="write results to a file instead of stdout")
    p.add_argument(
        "--plot",
        nargs="?",
        const="",
        metavar="PATH",
        help="also render the series to a figure (default path derives from --out)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchsim",
        description="Benchmark matching policies for workers with unknown skills.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from config/flags")
    p_run.add_argument("--preset", choices=PRESET_NAMES, help="start from a named preset")
    _add_common_flags(p_run)

    p_preset = sub.add_parser("preset", help="run a named benchmark preset")
    p_preset.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    _add_common_flags(p_preset)

    p_sweep = sub.add_parser("sweep", help="sweep one config key over values")
    p_sweep.add_argument("--key", required=True, metavar="KEY", help="config key to sweep")
    p_sweep.add_argument(
        "--values", required=True, metavar="V1,V2,...", help="comma-separated values"
    )
    p_sweep.add_argument("--preset", choices=PRESET_NAMES, help="start from a named preset")
    _add_common_flags(p_sweep)

    p_solve = sub.add_parser("solve", help="solve one assignment matrix file")
    p_solve.add_argument("matrix", metavar="PATH", help="whitespace-separated matrix file")
    p_solve.add_argument("--out", metavar="PATH", help="write the result to a file")

    return parser


def _env_seed() -> int | None:
    raw = os.environ.get(_SEED_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{_SEED_ENV} must be an integer, got {raw!r}")


def _overrides_from_flags(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.tasks is not None:
        try:
            overrides["tasks"] = [int(part) for part in str(args.tasks).split(",") if part]
        except ValueError:
            raise ConfigError(f"tasks: expected integers, got {args.tasks!r}")
    if args.skills is not None:
        overrides["skills"] = args.skills
    if args.flip_prob is not None:
        overrides["noise.flip_prob"] = args.flip_prob
    if args.policies is not None:
        overrides["policies"] = [part for part in args.policies.split(",") if part]
    if args.format is not None:
        overrides["format"] = args.format
    return overrides


def _build_config(args: argparse.Namespace, preset_name: str | None) -> ExperimentConfig:
    env_seed = _env_seed()
    base = preset(preset_name, seed=env_seed or 0) if preset_name else None
    if base is None and env_seed is not None:
        base = ExperimentConfig(seed=env_seed)
    return parse_config(path=args.config, overrides=_overrides_from_flags(args), base=base)


def _write_output(text: str, out: str | None) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _maybe_plot(args: argparse.Namespace, series: list[MetricSeries], fallback: str) -> None:
    if getattr(args, "plot", None) is None:
        return
    if args.plot:
        path = Path(args.plot)
    elif args.out:
        path = Path(args.out).with_suffix(".png")
    else:
        path = Path(fallback)
    from matchsim.plotting import render_series

    render_series(series, path)
    print(f"figure written to {path}", file=sys.stderr)


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _build_config(args, getattr(args, "preset", None))
    series = run_experiment(cfg)
    _write_output(emit_results(series, cfg.output_format), args.out)
    _maybe_plot(args, series, "results.png")
    return 0


def _cmd_preset(args: argparse.Namespace) -> int:
    cfg = _build_config(args, args.name)
    series = run_experiment(cfg)
    _write_output(emit_results(series, cfg.output_format), args.out)
    _maybe_plot(args, series, f"{args.name}.png")
    return 0


def _parse_sweep_values(raw: str) -> list:
    values = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            values.append(json.loads(part))
        except json.JSONDecodeError:
            raise ConfigError(f"sweep values must be JSON scalars, got {part!r}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    return values


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.key not in KNOWN_KEYS:
        raise ConfigError(f"unknown config key {args.key!r}")
    values = _parse_sweep_values(args.values)
    base = _build_config(args, getattr(args, "preset", None))
    if len(base.task_counts) != 1:
        raise ConfigError("sweep needs exactly one task count in the base config")

    collected: dict[str, list[tuple[float, float, float]]] = {}
    metric = base.metric
    for value in values:
        try:
            x = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"sweep values must be numeric, got {value!r}")
        cfg = parse_config(overrides={args.key: value}, base=base)
        for s in run_experiment(cfg):
            collected.setdefault(s.name, []).append((x, s.mean[-1], s.stderr[-1]))
        metric = cfg.metric
    series = [
        MetricSeries(
            name=name,
            metric=metric,
            x=tuple(p[0] for p in points),
            mean=tuple(p[1] for p in points),
            stderr=tuple(p[2] for p in points),
        )
        for name, points in collected.items()
    ]
    _write_output(emit_results(series, base.output_format), args.out)
    _maybe_plot(args, series, "sweep.png")
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    path = Path(args.matrix)
    try:
        rows = [
            [float(cell) for cell in line.split()]
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
    except FileNotFoundError:
        raise ConfigError(f"matrix file not found: {path}")
    except ValueError as exc:
        raise ConfigError(f"matrix file {path} is not numeric: {exc}")
    if not rows or any(len(row) != len(rows) for row in rows):
        raise ConfigError(f"matrix file {path} must hold a square matrix")
    matching = solve(np.asarray(rows))
    lines = [f"{row} -> {col}" for row, col in enumerate(matching.assignment)]
    lines.append(f"total_cost {matching.total_cost!r}")
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "preset": _cmd_preset,
        "sweep": _cmd_sweep,
        "solve": _cmd_solve,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
