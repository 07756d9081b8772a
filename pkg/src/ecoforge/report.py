"""Render a simulation time series as a population chart image.

One line per model component (population counts on the left axis, pool
amounts on the right), x axis in months. Colors are assigned by a stable
hash of the series name so a component keeps its color across runs.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .engine import TimeSeries

_PALETTE = (
    "#2b6cb0",
    "#2f855a",
    "#b7791f",
    "#9f7aea",
    "#c53030",
    "#319795",
    "#b83280",
    "#718096",
)


def series_color(name: str) -> str:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return _PALETTE[digest[0] % len(_PALETTE)]


def render_timeseries(series: TimeSeries, path: str | Path, title: str = "") -> Path:
    """Write a PNG chart of the run; returns the written path."""
    path = Path(path)
    ticks = [frame.tick for frame in series.frames]
    fig, ax = plt.subplots(figsize=(9, 5))
    for i, name in enumerate(series.population_names):
        ax.plot(
            ticks,
            [frame.counts[i] for frame in series.frames],
            label=name,
            color=series_color(name),
            linewidth=1.6,
        )
    pool_ax = None
    if series.pool_names:
        pool_ax = ax.twinx()
        for j, name in enumerate(series.pool_names):
            pool_ax.plot(
                ticks,
                [frame.amounts[j] for frame in series.frames],
                label=f"{name} (amount)",
                color=series_color(name),
                linestyle="--",
                linewidth=1.2,
            )
        pool_ax.set_ylabel("Amount")
    ax.set_xlabel("Time (months)")
    ax.set_ylabel("Population")
    ax.set_title(title or "Simulation output")
    ax.grid(alpha=0.25)
    handles, labels = ax.get_legend_handles_labels()
    if pool_ax is not None:
        extra_handles, extra_labels = pool_ax.get_legend_handles_labels()
        handles += extra_handles
        labels += extra_labels
    if handles:
        ax.legend(handles, labels, loc="upper right", fontsize=8)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
