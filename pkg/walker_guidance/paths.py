#!/usr/bin/env python

import itertools
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path as FilePath
from typing import NamedTuple

import numpy as np
from dataclasses_json import DataClassJsonMixin

from .constants import (
    STUDY_C_RADIUS_M,
    STUDY_LINE_LENGTH_M,
    STUDY_S_RADIUS_M,
    STUDY_S_SWEEP_FRACTIONS,
    PathShape,
    SegmentKind,
)
from .utils import Point, normalize_angle

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

JOINT_TOLERANCE_M = 1e-9
DOMAIN_TOLERANCE_M = 1e-9
TIE_TOLERANCE_M2 = 1e-12

# How far behind the previous foot a forward-progress projection may look
DEFAULT_BACKTRACK_M = 0.5


class PathDomainError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Pose(DataClassJsonMixin):
    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def position(self) -> Point:
        return (self.x, self.y)


@dataclass(frozen=True, slots=True)
class Segment(DataClassJsonMixin):
    kind: SegmentKind
    start_pose: Pose
    length: float
    curvature: float

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise ValueError(f"Segment length must be > 0, got {self.length}")
        if self.kind == SegmentKind.arc and self.curvature == 0:
            raise ValueError("Arc segments need a non-zero curvature")
        if self.kind == SegmentKind.line and self.curvature != 0:
            raise ValueError(
                f"Line segments have zero curvature, got {self.curvature}"
            )

    def local_point(self, u: float) -> tuple[float, float, float]:
        """Position and tangent heading at arc length u from the segment start."""
        x0, y0, th0 = self.start_pose.x, self.start_pose.y, self.start_pose.theta
        if self.kind == SegmentKind.line:
            return (x0 + u * math.cos(th0), y0 + u * math.sin(th0), th0)

        c = self.curvature
        th = th0 + c * u
        return (
            x0 + (math.sin(th) - math.sin(th0)) / c,
            y0 - (math.cos(th) - math.cos(th0)) / c,
            th,
        )

    @property
    def end_pose(self) -> Pose:
        x, y, th = self.local_point(self.length)
        return Pose(x, y, th)

    @property
    def center(self) -> Point:
        """Centre of curvature (arcs only)."""
        if self.kind != SegmentKind.arc:
            raise ValueError("Line segments have no centre of curvature")
        th0 = self.start_pose.theta
        return (
            self.start_pose.x - math.sin(th0) / self.curvature,
            self.start_pose.y + math.cos(th0) / self.curvature,
        )

    def candidate_abscissae(self, p: Point, u_lo: float, u_hi: float) -> list[float]:
        """Local abscissae in [u_lo, u_hi] that may be the nearest point to p.

        Always includes both ends of the window; adds the interior foot of the
        perpendicular when it falls inside the window. Sorted ascending.
        """
        candidates = {u_lo, u_hi}
        if self.kind == SegmentKind.line:
            th0 = self.start_pose.theta
            t = (p[0] - self.start_pose.x) * math.cos(th0) + (
                p[1] - self.start_pose.y
            ) * math.sin(th0)
            candidates.add(min(max(t, u_lo), u_hi))
            return sorted(candidates)

        cx, cy = self.center
        if math.hypot(p[0] - cx, p[1] - cy) < 1e-12:
            # Every arc point is equidistant from the centre
            return sorted(candidates)

        c = self.curvature
        radial_start = self.start_pose.theta - math.copysign(math.pi / 2, c)
        phi = math.atan2(p[1] - cy, p[0] - cx)
        swept = ((phi - radial_start) * math.copysign(1.0, c)) % (2 * math.pi)
        u_foot = swept / abs(c)
        if u_lo <= u_foot <= u_hi:
            candidates.add(u_foot)
        return sorted(candidates)


class PathPoint(NamedTuple):
    point: Point
    theta_c: float
    curvature: float


@dataclass(frozen=True, slots=True)
class FrenetState:
    s_star: float
    f_a: Point
    y_d: float
    theta_d: float
    theta_c: float
    curvature: float


@dataclass(frozen=True)
class Path(DataClassJsonMixin):
    segments: list[Segment]
    path_id: str = "path"

    def __post_init__(self) -> None:
        if len(self.segments) == 0:
            raise ValueError("A path needs at least one segment")

        # Only C0 continuity is required, corners are allowed
        for i, (prev, nxt) in enumerate(itertools.pairwise(self.segments)):
            end = prev.end_pose
            gap = math.hypot(end.x - nxt.start_pose.x, end.y - nxt.start_pose.y)
            if gap > JOINT_TOLERANCE_M:
                raise ValueError(
                    f"Segments {i} and {i + 1} are not connected (gap of {gap:.3e} m)"
                )

    @property
    def total_length(self) -> float:
        return float(sum(seg.length for seg in self.segments))

    @cached_property
    def segment_starts(self) -> list[float]:
        starts = [0.0]
        for seg in self.segments[:-1]:
            starts.append(starts[-1] + seg.length)
        return starts

    @property
    def start_pose(self) -> Pose:
        return self.segments[0].start_pose

    @property
    def end_pose(self) -> Pose:
        return self.segments[-1].end_pose

    def segment_index(self, s: float) -> int:
        idx = bisect_right(self.segment_starts, s) - 1
        return min(max(idx, 0), len(self.segments) - 1)

    def is_straight_between(self, s_from: float, s_to: float) -> bool:
        """True when every segment overlapping [s_from, s_to] is a line."""
        s_to = min(s_to, self.total_length)
        for seg, s0 in zip(self.segments, self.segment_starts, strict=True):
            if s0 + seg.length < s_from or s0 > s_to:
                continue
            if seg.kind != SegmentKind.line:
                return False
        return True

    def sample(self, n: int = 200) -> np.ndarray:
        """Return an (n, 2) array of evenly spaced points along the path."""
        s_values = np.linspace(0.0, self.total_length, n)
        return np.array([point_at(self, float(s)).point for s in s_values])


###############################################################################


def point_at(path: Path, s: float) -> PathPoint:
    """Position, tangent orientation and signed curvature at abscissa s."""
    total = path.total_length
    if s < -DOMAIN_TOLERANCE_M or s > total + DOMAIN_TOLERANCE_M:
        raise PathDomainError(f"Abscissa {s} is outside the path range [0, {total}]")
    s = min(max(s, 0.0), total)

    idx = path.segment_index(s)
    seg = path.segments[idx]
    u = min(s - path.segment_starts[idx], seg.length)
    x, y, th = seg.local_point(u)
    return PathPoint(point=(x, y), theta_c=normalize_angle(th), curvature=seg.curvature)


def project(
    path: Path,
    pose: Pose,
    s_hint: float | None = None,
    backtrack: float = DEFAULT_BACKTRACK_M,
) -> FrenetState:
    """Project a pose onto the path (nearest point) and return its Frenet errors.

    Parameters
    ----------
    path : Path
        The path to project onto.
    pose : Pose
        Walker pose in the world frame.
    s_hint : float, optional
        Previous foot abscissa. When given, feet further than `backtrack` behind
        it are not considered, which keeps the foot from jumping backwards
        between equidistant candidates during a trial.
    backtrack : float
        How far behind `s_hint` the foot may still move.

    Returns
    -------
    FrenetState
        Foot F_a, its abscissa, the signed lateral error (positive left of the
        path) and the heading error.
    """
    if not (math.isfinite(pose.x) and math.isfinite(pose.y) and math.isfinite(pose.theta)):
        raise ValueError(f"Cannot project a non-finite pose: {pose}")

    s_min = None if s_hint is None else s_hint - backtrack
    if s_min is not None and s_min > path.total_length:
        s_min = None

    p = pose.position
    best: tuple[float, float, float, float, float, float] | None = None
    for seg, s0 in zip(path.segments, path.segment_starts, strict=True):
        u_lo = 0.0
        if s_min is not None:
            if s0 + seg.length < s_min:
                continue
            u_lo = max(0.0, s_min - s0)

        for u in seg.candidate_abscissae(p, u_lo, seg.length):
            x, y, th = seg.local_point(u)
            d2 = (p[0] - x) ** 2 + (p[1] - y) ** 2
            # Strict improvement keeps the smallest abscissa on ties
            if best is None or d2 < best[0] - TIE_TOLERANCE_M2:
                best = (d2, s0 + u, x, y, th, seg.curvature)

    assert best is not None
    d2, s_star, fx, fy, theta_c, curvature = best

    # Signed by the side of the tangent, magnitude is the foot distance
    dist = math.sqrt(d2)
    cross = math.cos(theta_c) * (p[1] - fy) - math.sin(theta_c) * (p[0] - fx)
    y_d = math.copysign(dist, cross) if dist > 0 else 0.0

    return FrenetState(
        s_star=min(s_star, path.total_length),
        f_a=(fx, fy),
        y_d=y_d,
        theta_d=normalize_angle(pose.theta - theta_c),
        theta_c=normalize_angle(theta_c),
        curvature=curvature,
    )


###############################################################################


def save_path(path: Path, out_path: str | FilePath) -> FilePath:
    """Write a path as a JSON document (segment list and path id)."""
    out_path = FilePath(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w") as open_file:
        open_file.write(path.to_json(indent=4))

    log.debug(f"Stored path {path.path_id} to {out_path}")
    return out_path


def load_path(path_file: str | FilePath) -> Path:
    with open(path_file) as open_file:
        return Path.from_json(open_file.read())


###############################################################################


def study_path_id(shape: PathShape | str, mirrored: bool) -> str:
    shape = PathShape(shape)
    return f"{shape.value}-mirrored" if mirrored else shape.value


def _chain_arcs(
    start_pose: Pose,
    radius: float,
    sweeps_and_signs: list[tuple[float, int]],
) -> list[Segment]:
    segments = []
    pose = start_pose
    for sweep, sign in sweeps_and_signs:
        seg = Segment(
            kind=SegmentKind.arc,
            start_pose=pose,
            length=radius * sweep,
            curvature=sign / radius,
        )
        segments.append(seg)
        pose = seg.end_pose
    return segments


def make_study_path(
    shape: PathShape | str,
    mirrored: bool = False,
    start_pose: Pose | None = None,
) -> Path:
    """Build one of the three study paths (straight, C and S shaped).

    The C path bends left and the outer S arcs bend left unless `mirrored`,
    which flips every curvature sign.
    """
    shape = PathShape(shape)
    if start_pose is None:
        start_pose = Pose(0.0, 0.0, 0.0)
    sign = -1 if mirrored else 1

    if shape == PathShape.I:
        segments = [
            Segment(
                kind=SegmentKind.line,
                start_pose=start_pose,
                length=STUDY_LINE_LENGTH_M,
                curvature=0.0,
            )
        ]
    elif shape == PathShape.C:
        segments = _chain_arcs(start_pose, STUDY_C_RADIUS_M, [(math.pi / 2, sign)])
    else:
        segments = _chain_arcs(
            start_pose,
            STUDY_S_RADIUS_M,
            [
                (2 * math.pi * fraction, sign * (-1 if i == 1 else 1))
                for i, fraction in enumerate(STUDY_S_SWEEP_FRACTIONS)
            ],
        )

    path = Path(segments=segments, path_id=study_path_id(shape, mirrored))
    log.debug(f"Built path {path.path_id} with length {path.total_length:.4f} m")
    return path
