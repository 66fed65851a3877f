"""Figures written alongside the tab-separated reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from matplotlib.figure import Figure

from .citegraph import CoverageRow


def _figure(n_bars: int) -> tuple[Figure, object]:
    fig = Figure(figsize=(6.0, max(2.0, 0.4 * n_bars + 1.2)), layout="constrained")
    return fig, fig.add_subplot()


def plot_coverage(rows: Sequence[CoverageRow], path: str | Path) -> Path:
    """Horizontal bars of resolution rate per source, annotated with counts."""
    rows = [r for r in rows if r.attempted]
    fig, ax = _figure(len(rows))
    labels = [r.source_tag for r in rows]
    rates = [100.0 * r.resolved / r.attempted for r in rows]
    ax.barh(labels, rates, color="0.55")
    for y, r in enumerate(rows):
        ax.text(1, y, f"{r.resolved}/{r.attempted} ({r.date_range})", va="center", fontsize=8)
    ax.set_xlim(0, 100)
    ax.set_xlabel("resolved (%)")
    ax.invert_yaxis()
    path = Path(path)
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
    return path


def plot_unresolved(items: Sequence[tuple[str, int]], path: str | Path) -> Path:
    """Most frequent unresolved reference keys."""
    fig, ax = _figure(len(items))
    ax.barh([k for k, _ in items], [c for _, c in items], color="0.35")
    ax.set_xlabel("unresolved references")
    ax.invert_yaxis()
    path = Path(path)
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
    return path
