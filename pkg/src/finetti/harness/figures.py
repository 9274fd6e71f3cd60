"""Matplotlib rendering of convergence studies."""

from __future__ import annotations

from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .study import StudyRecord  # noqa: E402
from .svg import series_of  # noqa: E402


def plot_study(records: Iterable[StudyRecord], path: str, dpi: int = 150) -> None:
    """Two panels: m_N against N with the limits dashed, and abs_err log-log."""
    records = sorted(records, key=StudyRecord.sort_key)
    fig, (ax_val, ax_err) = plt.subplots(1, 2, figsize=(11, 4.5))
    limits = {}
    for (p, alpha, method), data in series_of(records).items():
        label = f"p={p:g}, α={alpha:g} ({method})"
        ns = [n for n, _ in data]
        vals = [r.value for r in records
                if (r.p, r.alpha, r.method) == (p, alpha, method) and r.N is not None]
        line, = ax_val.semilogx(ns, vals, marker="o", ms=3, label=label)
        limits.setdefault((p, alpha), (line.get_color(), None))
        pos = [(n, e) for n, e in data if e > 0]
        if pos:
            ax_err.loglog(*zip(*pos), marker="o", ms=3, color=line.get_color(), label=label)
    for r in records:
        key = (r.p, r.alpha)
        if key in limits and limits[key][1] is None:
            color = limits[key][0]
            ax_val.axhline(r.mu_limit, color=color, ls="--", lw=0.8)
            limits[key] = (color, r.mu_limit)
    ax_val.set_xlabel("N")
    ax_val.set_ylabel("expected density m_N")
    ax_err.set_xlabel("N")
    ax_err.set_ylabel("|m_N − μ|")
    for ax in (ax_val, ax_err):
        ax.grid(True, which="both", alpha=0.3)
    if ax_err.get_legend_handles_labels()[0]:
        ax_err.legend(fontsize=8, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
