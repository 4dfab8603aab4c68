#!/usr/bin/env python

import math

import numpy as np

###############################################################################

Point = tuple[float, float]

SERIES_THRESHOLD = 1e-4

###############################################################################


def normalize_angle(angle: float) -> float:
    """Wrap an angle into the half-open interval [-pi, pi).

    Parameters
    ----------
    angle : float
        Angle in radians, any magnitude.

    Returns
    -------
    float
        The equivalent angle in [-pi, pi).

    Examples
    --------
    >>> normalize_angle(math.pi)
    -3.141592653589793
    >>> normalize_angle(3 * math.pi / 2)
    -1.5707963267948966
    """
    # In-range angles come back unchanged so wrapping is idempotent
    if -math.pi <= angle < math.pi:
        return angle

    wrapped = (angle + math.pi) % (2 * math.pi) - math.pi
    # Float modulo can land exactly on +pi for tiny negative inputs
    if wrapped >= math.pi:
        wrapped -= 2 * math.pi
    return wrapped


def sinc(x: float) -> float:
    """Return sin(x) / x, using the series 1 - x^2 / 6 near zero."""
    if abs(x) < SERIES_THRESHOLD:
        return 1.0 - x * x / 6.0
    return math.sin(x) / x


def sine_difference_ratio(a: float, b: float) -> float:
    """Return (sin(a) - sin(b)) / (a - b), continuous as a approaches b.

    Near a = b the ratio tends to cos(a); the first series terms are used when
    |a - b| is below the series threshold.
    """
    d = a - b
    if abs(d) < SERIES_THRESHOLD:
        m = 0.5 * (a + b)
        return math.cos(m) * (1.0 - d * d / 24.0)
    return (math.sin(a) - math.sin(b)) / d


def rotate_into_frame(vec: Point, theta: float) -> Point:
    """Apply [[cos, sin], [-sin, cos]] to a vector (world to a frame rotated by theta)."""
    c = math.cos(theta)
    s = math.sin(theta)
    return (c * vec[0] + s * vec[1], -s * vec[0] + c * vec[1])


def distance(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def polyline_length(xs: np.ndarray, ys: np.ndarray) -> float:
    """Sum of consecutive point distances of a polyline."""
    if len(xs) < 2:
        return 0.0
    return float(np.sum(np.hypot(np.diff(xs), np.diff(ys))))
