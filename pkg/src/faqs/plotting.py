"""Figures for replay series: FIB size, cumulative time and cumulative changes."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import Sample  # noqa: E402


def plot_series(series: Sequence[Sample], path, title: str | None = None) -> Path:
    """Three stacked panels sharing the update axis; written to ``path``."""
    xs = [s.update for s in series]
    fig, (size, time, changes) = plt.subplots(3, 1, sharex=True, figsize=(7, 8))
    size.plot(xs, [s.original_size for s in series], label="original")
    size.plot(xs, [s.aggregated_size for s in series], label="aggregated")
    size.set_ylabel("FIB entries")
    size.legend(loc="best")
    time.plot(xs, [s.cum_time_s for s in series], color="tab:green")
    time.set_ylabel("cumulative time (s)")
    changes.plot(xs, [s.cum_changes for s in series], color="tab:red")
    changes.set_ylabel("cumulative FIB changes")
    changes.set_xlabel("updates applied")
    for ax in (size, time, changes):
        ax.grid(True, alpha=0.3)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=100)
    plt.close(fig)
    return out
