"""Report figures rendered to files (Agg backend, no display needed)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bench import ScalingTable  # noqa: E402
from .pipeline import METRIC_NAMES, STAGES, RunReport  # noqa: E402

STYLE = {
    "axes.labelsize": 10,
    "font.size": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_scaling(table: ScalingTable, path) -> Path:
    """Log-log time and memory proxy against N, each with a unit-slope guide."""
    n = np.array(table.sizes, dtype=float)
    secs = np.array([r.seconds for r in table.rows])
    mem = np.array([r.memory_proxy for r in table.rows], dtype=float)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(7.0, 2.8))
        for ax, y, label, slope in ((axes[0], secs, "wall-clock (s)", table.time_slope if n.size > 1 else np.nan),
                                    (axes[1], mem, "memory proxy (elements)", table.memory_slope if n.size > 1 else np.nan)):
            ax.loglog(n, y, "o-", color="C0", label=f"measured (slope {slope:.3f})")
            ax.loglog(n, y[0] * n / n[0], "--", color="0.5", label="linear")
            ax.set_xlabel("N")
            ax.set_ylabel(label)
            ax.legend(frameon=False)
        fig.tight_layout()
    return _save(fig, path)


def plot_report(report: RunReport, path) -> Path:
    """Per-metric mean and std over runs (left) and mean stage timings (right)."""
    summary = report.summary()
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(7.0, 2.8))
        if summary:
            means = [summary[m][0] for m in METRIC_NAMES]
            stds = [summary[m][1] for m in METRIC_NAMES]
            axes[0].bar([m.upper() for m in METRIC_NAMES], means, yerr=stds, color="C0", capsize=3)
            axes[0].set_ylim(min(0.0, min(means)), 100)
            axes[0].set_ylabel("score (%)")
        else:
            axes[0].text(0.5, 0.5, "no ground truth", ha="center", va="center",
                         transform=axes[0].transAxes)
            axes[0].set_axis_off()
        t = [np.mean([r.timings[s] for r in report.runs]) for s in STAGES]
        axes[1].bar(STAGES, t, color="C1")
        axes[1].set_ylabel("seconds")
        fig.tight_layout()
    return _save(fig, path)
