"""Result emission: CSV, JSON, and plot-coordinate text for metric series."""

from __future__ import annotations

import csv
import io
import json

from matchsim.errors import ConfigError
from matchsim.simulator import MetricSeries


def _fmt(value: float) -> str:
    """Shortest exact decimal form; integral values print without a dot."""
    if value == int(value):
        return str(int(value))
    return repr(value)


def emit_csv(series: list[MetricSeries]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["series", "x", "mean", "stderr"])
    for s in series:
        for x, mean, err in zip(s.x, s.mean, s.stderr):
            writer.writerow([s.name, _fmt(x), _fmt(mean), _fmt(err)])
    return buf.getvalue()


def emit_json(series: list[MetricSeries]) -> str:
    payload = [
        {
            "series": s.name,
            "metric": s.metric,
            "points": [
                {"x": x, "mean": mean, "stderr": err}
                for x, mean, err in zip(s.x, s.mean, s.stderr)
            ],
        }
        for s in series
    ]
    return json.dumps(payload, indent=2) + "\n"


def series_from_json(text: str) -> list[MetricSeries]:
    """Inverse of ``emit_json``; values round-trip exactly."""
    payload = json.loads(text)
    out = []
    for entry in payload:
        points = entry["points"]
        out.append(
            MetricSeries(
                name=entry["series"],
                metric=entry["metric"],
                x=tuple(p["x"] for p in points),
                mean=tuple(p["mean"] for p in points),
                stderr=tuple(p["stderr"] for p in points),
            )
        )
    return out


def emit_coords(series: list[MetricSeries]) -> str:
    """Per-series ``(x, mean)`` coordinate lists for plotting tools."""
    blocks = []
    for s in series:
        coords = "".join(f"({_fmt(x)}, {_fmt(mean)})" for x, mean in zip(s.x, s.mean))
        blocks.append(f"# {s.name}\n{coords}\n")
    return "\n".join(blocks)


def emit_results(series: list[MetricSeries], fmt: str = "csv") -> str:
    """Render series in the requested output format."""
    if not series:
        raise ConfigError("no series to emit")
    if fmt == "csv":
        return emit_csv(series)
    if fmt == "json":
        return emit_json(series)
    if fmt == "coords":
        return emit_coords(series)
    raise ConfigError(f"format: must be csv, json or coords, got {fmt!r}")
