"""Matplotlib renderings written straight to files.

Figures are built on an explicit ``Figure`` (no pyplot state) and saved with
fixed metadata and hash salt so repeated runs give identical bytes.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
from matplotlib.figure import Figure
from matplotlib.patches import Polygon

BLUE = "#1f6fb4"
GREEN = "#2ca02c"
REGION_FILL = "#ffffff"
POLYGON_FILL = "#e8e8e8"

# 600 x 600 points, mapped onto [-0.75, 0.75]^2
CANVAS_PT = 600
HALF_WIDTH = 0.75

_RC = {"svg.hashsalt": "gptcoexist", "svg.fonttype": "none", "path.simplify": False}


def _save(fig: Figure, path: Path) -> None:
    path = Path(path)
    fmt = path.suffix.lstrip(".").lower() or "svg"
    metadata = {"Date": None} if fmt in ("svg", "pdf") else None
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format=fmt, metadata=metadata)


def region_figure(report) -> Figure:
    fig = Figure(figsize=(CANVAS_PT / 72, CANVAS_PT / 72))
    ax = fig.add_axes((0, 0, 1, 1))
    ax.set_xlim(-HALF_WIDTH, HALF_WIDTH)
    ax.set_ylim(-HALF_WIDTH, HALF_WIDTH)
    ax.set_aspect("equal")
    ax.set_axis_off()

    outline = report.clipped_to.vertices
    ax.add_patch(Polygon(outline, closed=True, facecolor=POLYGON_FILL, edgecolor=BLUE, linewidth=1.5))
    region = report.region.vertices
    if len(region) >= 3:
        ax.add_patch(Polygon(region, closed=True, facecolor=REGION_FILL, edgecolor="none"))
    elif len(region) == 2:
        ax.plot(region[:, 0], region[:, 1], color=REGION_FILL, linewidth=2.0)
    ax.plot([0.0], [0.0], "o", color=BLUE, markersize=5)
    e = tuple(report.fixed_effect)
    ax.plot([e[0]], [e[1]], "o", color=GREEN, markersize=6)
    return fig


def save_region_figure(report, path) -> None:
    _save(region_figure(report), path)


def limit_figure(rows) -> Figure:
    """Relative area gap against the number of polygon sides (log-log)."""
    ns = [r[0] for r in rows]
    gaps = [r[3] for r in rows]
    fig = Figure(figsize=(5.0, 3.75))
    ax = fig.add_subplot(1, 1, 1)
    ax.loglog(ns, gaps, "o-", color=BLUE)
    ax.set_xlabel("polygon sides n")
    ax.set_ylabel("relative area gap")
    fig.tight_layout()
    return fig


def save_limit_figure(rows, path) -> None:
    _save(limit_figure(rows), path)
