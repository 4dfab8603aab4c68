#!/usr/bin/env python

import logging
from collections.abc import Sequence
from pathlib import Path as FilePath

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .paths import Path
from .trial import TrialTrace

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

# SVG user units are points at 72 dpi, so one unit per centimetre
SVG_DPI = 72
CM_PER_M = 100
PLOT_MARGIN_M = 0.5
PATH_SAMPLES = 400

matplotlib.rcParams["svg.hashsalt"] = "walker-guidance"
matplotlib.rcParams["svg.fonttype"] = "none"


def plot_trajectories(
    paths: Sequence[Path],
    traces: Sequence[TrialTrace],
    out_path: str | FilePath,
    title: str | None = None,
) -> FilePath:
    """Draw planned paths (solid) and walked trajectories (dashed) to an SVG file.

    The drawing is at a fixed scale of one SVG unit per centimetre of floor.
    Output is byte-stable for identical inputs.
    """
    out_path = FilePath(out_path)

    planned = [p.sample(PATH_SAMPLES) for p in paths]
    walked = [t.positions for t in traces if len(t) > 0]
    all_points = np.vstack(planned + walked)
    lo = all_points.min(axis=0) - PLOT_MARGIN_M
    hi = all_points.max(axis=0) + PLOT_MARGIN_M
    extent_cm = (hi - lo) * CM_PER_M

    fig = Figure(figsize=(extent_cm[0] / SVG_DPI, extent_cm[1] / SVG_DPI), dpi=SVG_DPI)
    ax = fig.add_axes((0.0, 0.0, 1.0, 1.0))
    ax.set_xlim(lo[0], hi[0])
    ax.set_ylim(lo[1], hi[1])
    ax.set_aspect("equal")
    ax.set_axis_off()

    for points in planned:
        ax.plot(points[:, 0], points[:, 1], linestyle="-", color="black", linewidth=1.5)
    for points in walked:
        ax.plot(points[:, 0], points[:, 1], linestyle="--", color="tab:blue", linewidth=0.8)
    if title is not None:
        ax.text(lo[0] + 0.1, hi[1] - 0.1, title, va="top", ha="left", fontsize=10)

    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    log.debug(f"Wrote trajectory plot {out_path}")
    return out_path
