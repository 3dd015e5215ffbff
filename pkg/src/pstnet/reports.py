"""Figure rendering for time-series outputs (file-based, non-interactive)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .dynamics import TimeSeries

__all__ = ["render_time_series"]


def render_time_series(
    series: TimeSeries,
    path: str,
    title: str | None = None,
    ylabel: str = "probability",
) -> str:
    """Render every series over the common grid to an image file."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=150)
    for label, values in series.series.items():
        ax.plot(series.times, values, label=label, linewidth=1.4)
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if series.series:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
