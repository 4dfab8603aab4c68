#!/usr/bin/env python

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from dataclasses_json import DataClassJsonMixin

from .constants import GuidanceSymbol
from .paths import FrenetState, Path, Pose, project
from .utils import Point, normalize_angle, rotate_into_frame

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

TANGENCY_TOLERANCE_M2 = 1e-12
ORIGIN_TOLERANCE_M = 1e-12


class UndefinedBearingError(ValueError):
    pass


@dataclass(frozen=True)
class SoundTarget(DataClassJsonMixin):
    p_world: Point
    s_world: Point
    s_cw: Point
    r: float
    theta_az: float


@dataclass(frozen=True)
class ConeSet:
    centers: tuple[float, ...]
    boundaries: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.boundaries) != len(self.centers) + 1:
            raise ValueError("A cone set needs exactly one more boundary than centres")
        if any(b <= a for a, b in itertools.pairwise(self.boundaries)):
            raise ValueError(f"Cone boundaries must be strictly increasing: {self.boundaries}")

    @property
    def count(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class HeadState:
    theta_i: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta_i", normalize_angle(self.theta_i))


@dataclass
class HeadMotionProfile(DataClassJsonMixin):
    amplitude_rad: float = 0.0
    frequency_hz: float = 0.0


###############################################################################


def make_cone_set(count: int) -> ConeSet:
    """Split the front semicircle into `count` equal cones centred on forward.

    Parameters
    ----------
    count : int
        Number of cones. Must be odd so that one cone points straight ahead.

    Returns
    -------
    ConeSet
        Centres and boundaries in radians, body frame (positive = left).
        Boundaries are built from their positive half and mirrored so the set
        is exactly symmetric about zero.
    """
    if count < 1 or count % 2 == 0:
        raise ValueError(f"Cone count must be a positive odd number, got {count}")

    width = math.pi / count
    half = (count - 1) // 2
    positive_centers = [j * width for j in range(1, half + 1)]
    positive_bounds = [(j + 0.5) * width for j in range(half)] + [math.pi / 2]

    centers = [-c for c in reversed(positive_centers)] + [0.0] + positive_centers
    boundaries = [-b for b in reversed(positive_bounds)] + positive_bounds
    return ConeSet(centers=tuple(centers), boundaries=tuple(boundaries))


LR_CONES = make_cone_set(3)


def cone_index(bearing: float, cones: ConeSet) -> int:
    """Index of the cone holding a front bearing.

    A bearing that lands on a boundary belongs to the cone on its forward side;
    +/- pi/2 belong to the outermost cones.
    """
    side = "left" if bearing > 0 else "right"
    idx = int(np.searchsorted(cones.boundaries, bearing, side=side)) - 1
    return min(max(idx, 0), cones.count - 1)


def _bearing(s_cw: Point) -> float:
    if math.hypot(s_cw[0], s_cw[1]) < ORIGIN_TOLERANCE_M:
        raise UndefinedBearingError("The sound point coincides with the walker")
    return math.atan2(s_cw[1], s_cw[0])


def _front_bearing(s_cw: Point) -> float:
    """Bearing folded onto the front semicircle; rear points go to +/- pi/2."""
    bearing = _bearing(s_cw)
    if s_cw[0] < 0:
        return math.pi / 2 if s_cw[1] > 0 else -math.pi / 2
    return bearing


def azimuth(s_cw: Point) -> float:
    """Renderer azimuth: 0 ahead, positive to the right."""
    return normalize_angle(-math.atan2(s_cw[1], s_cw[0]))


def to_walker_frame(s_world: Point, pose: Pose) -> Point:
    return rotate_into_frame((s_world[0] - pose.x, s_world[1] - pose.y), pose.theta)


def classify_lr(s_cw: Point) -> GuidanceSymbol:
    """Three-cone Left/Right/Straight classification of a walker-frame point."""
    idx = cone_index(_front_bearing(s_cw), LR_CONES)
    return (GuidanceSymbol.right, GuidanceSymbol.straight, GuidanceSymbol.left)[idx]


def binaural_quantize(s_cw: Point, cones: ConeSet) -> Point:
    """Snap a walker-frame point onto the centre ray of its cone, keeping its range."""
    beta = cones.centers[cone_index(_front_bearing(s_cw), cones)]
    r = math.hypot(s_cw[0], s_cw[1])
    return (r * math.cos(beta), r * math.sin(beta))


def head_compensate(s_s: Point, head: HeadState) -> Point:
    return rotate_into_frame(s_s, head.theta_i)


def head_yaw(t: float, profile: HeadMotionProfile) -> float:
    if profile.amplitude_rad == 0 or profile.frequency_hz == 0:
        return 0.0
    return profile.amplitude_rad * math.sin(2 * math.pi * profile.frequency_hz * t)


###############################################################################


def lookahead_points(
    pose: Pose,
    fs: FrenetState,
    path: Path,
    ds: float,
) -> tuple[Point, Point]:
    """Return (P, S): the lookahead point and the sound source on the path.

    P comes from intersecting the path tangent line at F_a with the circle of
    radius ds around the walker. With two intersections the forward one is
    used, with a single one P is the tangency point (F_a), and with none P is
    ds along the segment from the walker toward F_a. S is P itself when P was an
    intersection and the path stays straight for the next ds metres, else the
    projection of P onto the path.
    """
    if ds <= 0:
        raise ValueError(f"ds must be > 0, got {ds}")

    fx, fy = fs.f_a
    tx, ty = math.cos(fs.theta_c), math.sin(fs.theta_c)
    dx, dy = pose.x - fx, pose.y - fy

    # Solve |F_a + t T - Q| = ds for t
    along = tx * dx + ty * dy
    disc = ds * ds - (dx * dx + dy * dy - along * along)

    if disc > TANGENCY_TOLERANCE_M2:
        root = math.sqrt(disc)
        hx, hy = math.cos(pose.theta), math.sin(pose.theta)
        candidates = [(fx + t * tx, fy + t * ty) for t in (along - root, along + root)]
        p = max(candidates, key=lambda c: (c[0] - pose.x) * hx + (c[1] - pose.y) * hy)
        intersects = True
    elif disc >= -TANGENCY_TOLERANCE_M2:
        p = (fx + along * tx, fy + along * ty)
        intersects = True
    else:
        dist = math.hypot(dx, dy)
        p = (pose.x - ds * dx / dist, pose.y - ds * dy / dist)
        intersects = False

    if intersects and path.is_straight_between(fs.s_star, fs.s_star + ds):
        return p, p

    s_on_path = project(path, Pose(p[0], p[1], fs.theta_c), s_hint=fs.s_star)
    return p, s_on_path.f_a


def compute_sound_point(pose: Pose, fs: FrenetState, path: Path, ds: float) -> Point:
    """World position of the virtual sound source S."""
    return lookahead_points(pose, fs, path, ds)[1]


def make_sound_target(pose: Pose, fs: FrenetState, path: Path, ds: float) -> SoundTarget:
    p, s = lookahead_points(pose, fs, path, ds)
    s_cw = to_walker_frame(s, pose)
    return SoundTarget(
        p_world=p,
        s_world=s,
        s_cw=s_cw,
        r=math.hypot(s_cw[0], s_cw[1]),
        theta_az=azimuth(s_cw),
    )
