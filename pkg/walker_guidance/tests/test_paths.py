#!/usr/bin/env python

import dataclasses
import json
import math
from pathlib import Path as FilePath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from walker_guidance.constants import PathShape, SegmentKind
from walker_guidance.paths import (
    Path,
    PathDomainError,
    Pose,
    Segment,
    load_path,
    make_study_path,
    point_at,
    project,
    save_path,
)

###############################################################################

ORACLE_SAMPLES = 100_000
ORACLE_POSES = 1000

GOLDEN_PATHS_DIR = FilePath(__file__).parent / "data" / "paths"


def _signed_foot_distance(path: Path, s: float, x: float, y: float) -> tuple[float, float]:
    (fx, fy), theta_c, _ = point_at(path, s)
    dist = math.hypot(x - fx, y - fy)
    cross = math.cos(theta_c) * (y - fy) - math.sin(theta_c) * (x - fx)
    return dist, math.copysign(dist, cross)


###############################################################################


@pytest.mark.parametrize(
    "shape, expected_length, n_segments",
    [
        (PathShape.I, 10.0, 1),
        (PathShape.C, 6.37 * math.pi / 2, 1),
        (PathShape.S, 4.78 * 2 * math.pi / 3, 3),
    ],
)
def test_study_path_lengths(shape: PathShape, expected_length: float, n_segments: int) -> None:
    path = make_study_path(shape)
    assert len(path.segments) == n_segments
    assert path.total_length == pytest.approx(expected_length, abs=1e-12)
    assert path.total_length == pytest.approx(10.0, abs=0.02)


def test_study_path_radii_from_curvature() -> None:
    c_path = make_study_path(PathShape.C)
    assert 1 / point_at(c_path, 0.0).curvature == pytest.approx(6.37, rel=1e-12)

    s_path = make_study_path(PathShape.S)
    for seg in s_path.segments:
        assert 1 / abs(seg.curvature) == pytest.approx(4.78, rel=1e-12)


@pytest.mark.parametrize(
    "mirrored, expected_signs",
    [(False, [1, -1, 1]), (True, [-1, 1, -1])],
)
def test_s_path_curvature_signs(mirrored: bool, expected_signs: list[int]) -> None:
    path = make_study_path(PathShape.S, mirrored=mirrored)
    assert [int(math.copysign(1, seg.curvature)) for seg in path.segments] == expected_signs
    assert path.path_id == ("S-mirrored" if mirrored else "S")


@pytest.mark.parametrize("shape", list(PathShape))
def test_study_paths_are_tangent_continuous(shape: PathShape) -> None:
    path = make_study_path(shape, start_pose=Pose(1.0, -2.0, 0.4))
    assert path.start_pose == Pose(1.0, -2.0, 0.4)
    for prev, nxt in zip(path.segments, path.segments[1:], strict=False):
        end = prev.end_pose
        assert math.hypot(end.x - nxt.start_pose.x, end.y - nxt.start_pose.y) < 1e-9
        assert abs(math.remainder(end.theta - nxt.start_pose.theta, 2 * math.pi)) < 1e-9


def test_discontinuous_segments_rejected() -> None:
    first = Segment(SegmentKind.line, Pose(0.0, 0.0, 0.0), 1.0, 0.0)
    second = Segment(SegmentKind.line, Pose(1.5, 0.0, 0.0), 1.0, 0.0)
    with pytest.raises(ValueError):
        Path(segments=[first, second])


def test_paths_may_have_corners() -> None:
    first = Segment(SegmentKind.line, Pose(0.0, 0.0, 0.0), 1.0, 0.0)
    second = Segment(SegmentKind.line, Pose(1.0, 0.0, math.pi / 2), 1.0, 0.0)
    path = Path(segments=[first, second], path_id="corner")
    assert path.total_length == pytest.approx(2.0)
    assert point_at(path, 2.0).point == pytest.approx((1.0, 1.0))


def test_path_is_frozen() -> None:
    path = make_study_path(PathShape.C)
    with pytest.raises(dataclasses.FrozenInstanceError):
        path.path_id = "other"  # type: ignore[misc]


@pytest.mark.parametrize("mirrored", [False, True])
@pytest.mark.parametrize("shape", list(PathShape))
def test_study_paths_match_golden_files(shape: PathShape, mirrored: bool) -> None:
    built = make_study_path(shape, mirrored=mirrored)
    golden = load_path(GOLDEN_PATHS_DIR / f"{built.path_id}.json")

    assert golden.path_id == built.path_id
    assert len(golden.segments) == len(built.segments)
    for expected, actual in zip(golden.segments, built.segments, strict=True):
        assert isinstance(expected.kind, SegmentKind)
        assert expected.kind == actual.kind
        assert expected.length == pytest.approx(actual.length, abs=1e-9)
        assert expected.curvature == pytest.approx(actual.curvature, abs=1e-9)
        assert (
            expected.start_pose.x,
            expected.start_pose.y,
            expected.start_pose.theta,
        ) == pytest.approx(
            (actual.start_pose.x, actual.start_pose.y, actual.start_pose.theta), abs=1e-9
        )


@pytest.mark.parametrize("mirrored", [False, True])
@pytest.mark.parametrize("shape", list(PathShape))
def test_save_and_load_path(tmp_path: FilePath, shape: PathShape, mirrored: bool) -> None:
    path = make_study_path(shape, mirrored=mirrored, start_pose=Pose(1.5, -0.25, 0.3))
    out = save_path(path, tmp_path / "nested" / f"{path.path_id}.json")

    loaded = load_path(out)
    assert loaded == path
    assert loaded.total_length == path.total_length
    assert loaded.segments[0].kind is path.segments[0].kind


def test_load_path_rejects_disconnected_segments(tmp_path: FilePath) -> None:
    document = make_study_path(PathShape.S).to_dict(encode_json=True)
    document["segments"][1]["start_pose"]["x"] += 0.5
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(document))
    with pytest.raises(ValueError):
        load_path(broken)


def test_segment_contracts() -> None:
    with pytest.raises(ValueError):
        Segment(SegmentKind.line, Pose(0.0, 0.0, 0.0), 0.0, 0.0)
    with pytest.raises(ValueError):
        Segment(SegmentKind.arc, Pose(0.0, 0.0, 0.0), 1.0, 0.0)


def test_pose_theta_is_normalized() -> None:
    assert Pose(0.0, 0.0, math.pi).theta == pytest.approx(-math.pi)
    assert Pose(0.0, 0.0, 3 * math.pi / 2).theta == pytest.approx(-math.pi / 2)
    assert -math.pi <= Pose(0.0, 0.0, 123.4).theta < math.pi
    assert Pose(0.0, 0.0, 0.3).theta == 0.3
    wrapped = Pose(0.0, 0.0, 123.4).theta
    assert Pose(0.0, 0.0, wrapped).theta == wrapped


###############################################################################


def test_point_at_straight() -> None:
    point, theta_c, curvature = point_at(make_study_path(PathShape.I), 3.0)
    assert point == pytest.approx((3.0, 0.0))
    assert theta_c == 0.0
    assert curvature == 0.0


def test_point_at_c_start() -> None:
    point, theta_c, curvature = point_at(make_study_path(PathShape.C), 0.0)
    assert point == pytest.approx((0.0, 0.0))
    assert theta_c == pytest.approx(0.0)
    assert curvature == pytest.approx(1 / 6.37)


def test_point_at_s_curvature_flips_at_first_joint() -> None:
    path = make_study_path(PathShape.S)
    joint = 4.78 * math.pi / 6
    assert point_at(path, joint - 1e-6).curvature > 0
    assert point_at(path, joint + 1e-6).curvature < 0


@pytest.mark.parametrize("s", [-0.1, 10.5])
def test_point_at_out_of_range(s: float) -> None:
    with pytest.raises(PathDomainError):
        point_at(make_study_path(PathShape.I), s)


###############################################################################


def test_project_straight_example() -> None:
    fs = project(make_study_path(PathShape.I), Pose(4.0, 0.2, 0.0))
    assert fs.s_star == pytest.approx(4.0)
    assert fs.y_d == pytest.approx(0.2)
    assert fs.theta_d == pytest.approx(0.0)
    assert fs.f_a == pytest.approx((4.0, 0.0))


def test_project_right_of_path_is_negative() -> None:
    fs = project(make_study_path(PathShape.I), Pose(4.0, -0.2, 0.3))
    assert fs.y_d == pytest.approx(-0.2)
    assert fs.theta_d == pytest.approx(0.3)


def test_project_on_path_aligned() -> None:
    path = make_study_path(PathShape.C)
    (x, y), theta_c, _ = point_at(path, 5.0)
    fs = project(path, Pose(x, y, theta_c))
    assert fs.y_d == pytest.approx(0.0, abs=1e-9)
    assert fs.theta_d == pytest.approx(0.0, abs=1e-9)


def test_project_arc_centre_tie_takes_smallest_abscissa() -> None:
    path = make_study_path(PathShape.C)
    centre = path.segments[0].center
    fs = project(path, Pose(centre[0], centre[1], 0.0))
    assert fs.s_star == pytest.approx(0.0)
    assert abs(fs.y_d) == pytest.approx(6.37)


def test_project_hint_prevents_backward_jump() -> None:
    path = make_study_path(PathShape.C)
    centre = path.segments[0].center
    fs = project(path, Pose(centre[0], centre[1], 0.0), s_hint=8.0)
    assert fs.s_star >= 8.0 - 0.5


def test_project_rejects_non_finite_pose() -> None:
    with pytest.raises(ValueError):
        project(make_study_path(PathShape.I), Pose(float("nan"), 0.0, 0.0))


@settings(max_examples=200, deadline=None)
@given(
    shape=st.sampled_from(list(PathShape)),
    fraction=st.floats(min_value=0.0, max_value=1.0),
)
def test_project_of_point_at_is_identity(shape: PathShape, fraction: float) -> None:
    path = make_study_path(shape)
    s = fraction * path.total_length
    (x, y), theta_c, _ = point_at(path, s)
    fs = project(path, Pose(x, y, theta_c))
    assert fs.s_star == pytest.approx(s, abs=1e-6)
    assert fs.y_d == pytest.approx(0.0, abs=1e-6)
    assert fs.theta_d == pytest.approx(0.0, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(
    x=st.floats(min_value=0.0, max_value=10.0),
    y=st.floats(min_value=-2.0, max_value=2.0),
    theta=st.floats(min_value=-3.0, max_value=3.0),
)
def test_project_mirror_symmetry_on_straight_path(x: float, y: float, theta: float) -> None:
    path = make_study_path(PathShape.I)
    fs = project(path, Pose(x, y, theta))
    mirrored = project(path, Pose(x, -y, -theta))
    assert mirrored.s_star == pytest.approx(fs.s_star, abs=1e-12)
    assert mirrored.y_d == pytest.approx(-fs.y_d, abs=1e-12)
    assert mirrored.theta_d == pytest.approx(-fs.theta_d, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    shape=st.sampled_from(list(PathShape)),
    x=st.floats(min_value=-3.0, max_value=13.0),
    y=st.floats(min_value=-8.0, max_value=8.0),
)
def test_lateral_error_is_foot_distance(shape: PathShape, x: float, y: float) -> None:
    fs = project(make_study_path(shape), Pose(x, y, 0.0))
    assert abs(fs.y_d) == pytest.approx(math.hypot(x - fs.f_a[0], y - fs.f_a[1]), abs=1e-9)


@pytest.mark.parametrize("shape", list(PathShape))
def test_project_matches_dense_sampling_oracle(shape: PathShape) -> None:
    path = make_study_path(shape)
    total = path.total_length
    s_grid = np.linspace(0.0, total, ORACLE_SAMPLES)
    grid = path.sample(ORACLE_SAMPLES)
    spacing = s_grid[1] - s_grid[0]

    rng = np.random.default_rng(20240601)
    for _ in range(ORACLE_POSES):
        # Random pose within 2 m of the path
        s_base = float(rng.uniform(0.0, total))
        offset = float(rng.uniform(-2.0, 2.0))
        (bx, by), theta_c, _ = point_at(path, s_base)
        x = bx - offset * math.sin(theta_c)
        y = by + offset * math.cos(theta_c)
        pose = Pose(x, y, float(rng.uniform(-math.pi, math.pi)))

        nearest = int(np.argmin((grid[:, 0] - x) ** 2 + (grid[:, 1] - y) ** 2))
        refined = minimize_scalar(
            lambda s: _signed_foot_distance(path, s, x, y)[0],
            bounds=(
                max(0.0, s_grid[nearest] - spacing),
                min(total, s_grid[nearest] + spacing),
            ),
            method="bounded",
            options={"xatol": 1e-9},
        )
        oracle_dist, oracle_y_d = _signed_foot_distance(path, float(refined.x), x, y)

        fs = project(path, pose)
        assert abs(fs.y_d) <= oracle_dist + 1e-9
        if abs(fs.s_star - float(refined.x)) <= 1e-3:
            assert fs.y_d == pytest.approx(oracle_y_d, abs=1e-3)
        else:
            # Only acceptable for two genuinely equidistant branches
            assert abs(fs.y_d) == pytest.approx(oracle_dist, abs=1e-9)
