#!/usr/bin/env python

import logging
import math
from dataclasses import dataclass, replace

from dataclasses_json import DataClassJsonMixin

from .paths import Pose
from .utils import normalize_angle

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

STRAIGHT_OMEGA_THRESHOLD = 1e-9
SATURATION_MARGIN_RAD = 1e-3


class SteeringSaturationError(ValueError):
    pass


@dataclass
class SteeredGeometry(DataClassJsonMixin):
    wheelbase_m: float = 0.6
    track_width_m: float = 0.5
    motor_steps_per_rev: int = 400
    gear_ratio: int = 4
    servo_max_rate_rad_s: float = 1.5

    def __post_init__(self) -> None:
        if self.wheelbase_m <= 0:
            raise ValueError(f"wheelbase_m must be > 0, got {self.wheelbase_m}")
        if self.track_width_m <= 0:
            raise ValueError(f"track_width_m must be > 0, got {self.track_width_m}")
        if self.motor_steps_per_rev < 1 or self.gear_ratio < 1:
            raise ValueError("motor_steps_per_rev and gear_ratio must be >= 1")
        if self.servo_max_rate_rad_s <= 0:
            raise ValueError(
                f"servo_max_rate_rad_s must be > 0, got {self.servo_max_rate_rad_s}"
            )

    @property
    def steps_per_wheel_rev(self) -> int:
        return self.motor_steps_per_rev * self.gear_ratio

    @property
    def grid_pitch_rad(self) -> float:
        return 2 * math.pi / self.steps_per_wheel_rev


@dataclass(frozen=True, slots=True)
class VehicleState:
    pose: Pose
    phi_left: float = 0.0
    phi_right: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi_left", normalize_angle(self.phi_left))
        object.__setattr__(self, "phi_right", normalize_angle(self.phi_right))


###############################################################################


def step_unicycle(pose: Pose, v: float, omega: float, dt: float) -> Pose:
    """Integrate the unicycle model exactly for constant (v, omega) over dt."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    theta = pose.theta
    if abs(omega) < STRAIGHT_OMEGA_THRESHOLD:
        return Pose(
            pose.x + v * dt * math.cos(theta),
            pose.y + v * dt * math.sin(theta),
            theta + omega * dt,
        )

    theta_next = theta + omega * dt
    radius = v / omega
    return Pose(
        pose.x + radius * (math.sin(theta_next) - math.sin(theta)),
        pose.y - radius * (math.cos(theta_next) - math.cos(theta)),
        theta_next,
    )


def ackermann_split(phi_halfcar: float, geometry: SteeredGeometry) -> tuple[float, float]:
    """Split a half-car steering angle into (left, right) wheel angles.

    Both wheel axes pass through the turn centre of the half-car model:
    cot(phi_left) = cot(phi) - w / (2L) and cot(phi_right) = cot(phi) + w / (2L).
    The left wheel is the inner one for positive (left) angles.
    """
    if abs(phi_halfcar) >= math.pi / 2:
        raise SteeringSaturationError(
            f"Half-car angle {phi_halfcar} is at or beyond +/- pi/2"
        )

    sin_phi = math.sin(phi_halfcar)
    if sin_phi == 0:
        return (0.0, 0.0)

    L = geometry.wheelbase_m
    half_track = geometry.track_width_m / 2
    cos_phi = math.cos(phi_halfcar)
    phi_left = math.atan2(L * sin_phi, L * cos_phi - half_track * sin_phi)
    phi_right = math.atan2(L * sin_phi, L * cos_phi + half_track * sin_phi)
    return (phi_left, phi_right)


def effective_steering(phi_left: float, phi_right: float, geometry: SteeredGeometry) -> float:
    """Recover the half-car angle from the two physical wheel angles.

    Each wheel is mapped back to the half-car angle it implies, then the two
    are averaged as curvatures (tan(phi) / L). For wheels that agree with an
    Ackermann split the result is exactly the split's input angle.
    """
    k = geometry.track_width_m / (2 * geometry.wheelbase_m)
    eq_left = math.atan2(math.sin(phi_left), math.cos(phi_left) + k * math.sin(phi_left))
    eq_right = math.atan2(math.sin(phi_right), math.cos(phi_right) - k * math.sin(phi_right))

    limit = math.pi / 2 - SATURATION_MARGIN_RAD
    if abs(eq_left) >= limit or abs(eq_right) >= limit:
        raise SteeringSaturationError(
            f"Wheel angles ({phi_left:.4f}, {phi_right:.4f}) rad saturate the steering"
        )

    return math.atan(0.5 * (math.tan(eq_left) + math.tan(eq_right)))


def steered_omega(phi: float, v: float, geometry: SteeredGeometry) -> float:
    if abs(phi) >= math.pi / 2 - SATURATION_MARGIN_RAD:
        raise SteeringSaturationError(f"Steering angle {phi} is at or beyond +/- pi/2")
    return math.tan(phi) / geometry.wheelbase_m * v


def step_steered(
    state: VehicleState,
    v: float,
    geometry: SteeredGeometry,
    dt: float,
) -> VehicleState:
    """Advance the front-steered walker by dt at push speed v."""
    phi_eff = effective_steering(state.phi_left, state.phi_right, geometry)
    omega = steered_omega(phi_eff, v, geometry)
    return replace(state, pose=step_unicycle(state.pose, v, omega, dt))


def wheel_servo_step(
    current: float,
    target: float,
    max_rate: float,
    dt: float,
    geometry: SteeredGeometry,
) -> float:
    """Rate-limited move toward target, snapped to the stepper grid."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if max_rate <= 0:
        raise ValueError(f"max_rate must be > 0, got {max_rate}")

    max_move = max_rate * dt
    moved = current + min(max(target - current, -max_move), max_move)

    pitch = geometry.grid_pitch_rad
    return round(moved / pitch) * pitch
