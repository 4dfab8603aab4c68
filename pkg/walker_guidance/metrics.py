#!/usr/bin/env python

import logging
from dataclasses import dataclass

import numpy as np
from dataclasses_json import DataClassJsonMixin

from .paths import Path, Pose, project
from .trial import TrialTrace
from .utils import polyline_length

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

DEFAULT_ERROR_SAMPLES = 100


class MetricsError(ValueError):
    pass


@dataclass
class TrialMetrics(DataClassJsonMixin):
    error_m: float
    time_s: float
    length_m: float
    speed_m_s: float
    complete: bool = True


###############################################################################


def trace_projection(trace: TrialTrace, path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Abscissa and signed lateral error of every trace sample, projected in order."""
    s_values = np.empty(len(trace))
    y_d_values = np.empty(len(trace))
    s_hint = None
    for i, sample in enumerate(trace.samples):
        fs = project(path, Pose(sample.x, sample.y, sample.theta), s_hint=s_hint)
        s_values[i] = fs.s_star
        y_d_values[i] = fs.y_d
        s_hint = fs.s_star
    return s_values, y_d_values


def orthogonal_error(
    s_values: np.ndarray,
    y_d_values: np.ndarray,
    total_length: float,
    n_samples: int = DEFAULT_ERROR_SAMPLES,
) -> float:
    """Mean |y_d| over n equally spaced abscissae, each using the nearest trace sample."""
    targets = np.linspace(0.0, total_length, n_samples)
    nearest = np.abs(s_values[np.newaxis, :] - targets[:, np.newaxis]).argmin(axis=1)
    return float(np.mean(np.abs(y_d_values[nearest])))


def compute_metrics(
    trace: TrialTrace,
    path: Path,
    n_samples: int = DEFAULT_ERROR_SAMPLES,
) -> TrialMetrics:
    """Error, time, walked length and speed of one trial.

    Parameters
    ----------
    trace : TrialTrace
        The simulated walk.
    path : Path
        The planned path the walk is measured against.
    n_samples : int
        Number of equally spaced abscissae the orthogonal error is averaged over.

    Returns
    -------
    TrialMetrics
        Metrics in SI units. Incomplete trials are flagged through `complete`.
    """
    if len(trace) == 0:
        raise MetricsError("Cannot compute metrics of an empty trace")

    time = trace.samples[-1].t
    if time <= 0:
        raise MetricsError(f"Trace of {trace.mode} on {trace.path_id} has no duration")

    s_values, y_d_values = trace_projection(trace, path)
    error = orthogonal_error(s_values, y_d_values, path.total_length, n_samples)

    positions = trace.positions
    length = polyline_length(positions[:, 0], positions[:, 1])

    if not trace.complete:
        log.warning(f"Metrics of {trace.mode} on {trace.path_id} come from an incomplete trial")

    return TrialMetrics(
        error_m=error,
        time_s=time,
        length_m=length,
        speed_m_s=length / time,
        complete=trace.complete,
    )
