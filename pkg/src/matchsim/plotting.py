"""Render metric series to figure files with matplotlib."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from matchsim.simulator import MetricSeries

_YLABEL = {
    "percent_of_optimal": "Percent of optimal",
    "success_rate": "Percent success rate",
}


def render_series(
    series: list[MetricSeries],
    path: str | Path,
    title: str | None = None,
    xlabel: str | None = None,
) -> Path:
    """Draw one line (with standard-error bars) per series and save the figure.

    The output format follows the file extension (png, pdf, svg).
    """
    path = Path(path)
    if xlabel is None:
        # A noise sweep stays within [0, 1]; task-count sweeps do not.
        xs = [x for s in series for x in s.x]
        xlabel = "Flip probability" if xs and max(xs) <= 1.0 else "Number of tasks"
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for s in series:
        ax.errorbar(s.x, s.mean, yerr=s.stderr, marker="o", markersize=3.5,
                    capsize=2, linewidth=1.2, label=s.name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(_YLABEL.get(series[0].metric, series[0].metric))
    if title:
        ax.set_title(title)
    ax.grid(True, axis="y", linestyle="--", alpha=0.5)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
