#!/usr/bin/env python

import logging
import math
from dataclasses import dataclass, field

from dataclasses_json import DataClassJsonMixin

from .guidance import (
    CorridorParams,
    GainSchedule,
    corridor_alpha,
    lyapunov_value,
    select_gains,
    v1_max,
)
from .kinematics import SteeredGeometry, VehicleState, ackermann_split, effective_steering
from .paths import FrenetState, Path, Pose, point_at, project
from .utils import normalize_angle, sine_difference_ratio

###############################################################################

log = logging.getLogger(__name__)

###############################################################################


class SteeringSingularityError(ValueError):
    pass


class ControllerSuspendedError(ValueError):
    pass


@dataclass
class SteeringGains(DataClassJsonMixin):
    k1: float = 1.0
    k2: float = 1.0
    k3: float = 1.0
    k4: float = 1.0
    k_delta_rad: float = 0.7
    phi_max_rad: float = 1.0

    def __post_init__(self) -> None:
        if min(self.k1, self.k2, self.k3, self.k4, self.k_delta_rad) <= 0:
            raise ValueError(f"Steering gains must all be > 0, got {self}")
        if self.k_delta_rad >= math.pi / 2:
            raise ValueError(f"k_delta_rad must be < pi/2, got {self.k_delta_rad}")
        if not 0 < self.phi_max_rad < math.pi / 2:
            raise ValueError(f"phi_max_rad must be in (0, pi/2), got {self.phi_max_rad}")


def _steering_corridor() -> CorridorParams:
    return CorridorParams(y_h_m=0.3, theta_h_rad=1.62)


@dataclass
class SteeringConfig(DataClassJsonMixin):
    gains: SteeringGains = field(default_factory=SteeringGains)
    corridor: CorridorParams = field(default_factory=_steering_corridor)
    # When off, the wheels follow the controller at full authority (alpha = 1)
    corridor_gate: bool = True


@dataclass(frozen=True, slots=True)
class VirtualTargetState:
    s: float
    s_v: float
    y_v: float
    theta_v: float


@dataclass(frozen=True, slots=True)
class SteeringCommand:
    omega_ref: float
    phi_d: float
    phi_a: float
    alpha: float
    phi: float
    phi_left: float
    phi_right: float


###############################################################################


def virtual_target_frame(path: Path, s: float, pose: Pose) -> VirtualTargetState:
    """Walker coordinates in the frame of the virtual vehicle at abscissa s."""
    s = min(max(s, 0.0), path.total_length)
    (vx, vy), theta_c, _ = point_at(path, s)
    dx, dy = pose.x - vx, pose.y - vy
    cos_c, sin_c = math.cos(theta_c), math.sin(theta_c)
    return VirtualTargetState(
        s=s,
        s_v=cos_c * dx + sin_c * dy,
        y_v=-sin_c * dx + cos_c * dy,
        theta_v=normalize_angle(pose.theta - theta_c),
    )


def init_virtual_target(path: Path, pose: Pose) -> VirtualTargetState:
    """Start the virtual vehicle at the projection foot of the walker."""
    return virtual_target_frame(path, project(path, pose).s_star, pose)


def approach_angle(y_v: float, v: float, k_delta: float) -> float:
    return -k_delta * math.tanh(y_v * v)


def virtual_target_step(
    vt: VirtualTargetState,
    pose: Pose,
    v: float,
    path: Path,
    gains: SteeringGains,
    dt: float,
) -> tuple[VirtualTargetState, float]:
    """Advance the virtual vehicle and return the walker angular velocity reference.

    Parameters
    ----------
    vt : VirtualTargetState
        Current virtual vehicle; only its abscissa is trusted, the walker
        coordinates are recomputed from `pose`.
    pose : Pose
        Current walker pose.
    v : float
        Walker speed in m/s.
    path : Path
        Path being followed.
    gains : SteeringGains
        Controller tuning.
    dt : float
        Step length in seconds.

    Returns
    -------
    tuple[VirtualTargetState, float]
        The virtual vehicle after the step and omega_ref = theta_v_dot + c(s) s_dot.
    """
    if v <= 0:
        raise ControllerSuspendedError(f"The steering controller is suspended at v = {v} m/s")
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    current = virtual_target_frame(path, vt.s, pose)
    curvature = point_at(path, current.s).curvature

    # Progression of the virtual vehicle
    s_dot = v * math.cos(current.theta_v) + gains.k2 * current.s_v

    # Approach angle and its time derivative through y_v
    delta = approach_angle(current.y_v, v, gains.k_delta_rad)
    y_v_dot = -curvature * s_dot * current.s_v + v * math.sin(current.theta_v)
    tanh_term = math.tanh(current.y_v * v)
    delta_dot = -gains.k_delta_rad * (1 - tanh_term * tanh_term) * v * y_v_dot

    theta_v_dot = (
        delta_dot
        - gains.k4 * gains.k1 * current.y_v * v * sine_difference_ratio(current.theta_v, delta)
        - gains.k3 * (current.theta_v - delta)
    )
    omega_ref = theta_v_dot + curvature * s_dot

    next_vt = virtual_target_frame(path, current.s + s_dot * dt, pose)
    return next_vt, omega_ref


def steering_from_omega(
    omega_ref: float,
    v: float,
    geometry: SteeredGeometry,
    phi_max: float = 1.0,
) -> float:
    """Invert tan(phi) / L * v = omega for phi, clamped to +/- phi_max."""
    if v <= 0:
        raise SteeringSingularityError(f"Steering angle is undefined at v = {v} m/s")
    phi = math.atan(geometry.wheelbase_m * omega_ref / v)
    return min(max(phi, -phi_max), phi_max)


def blend_steering(phi_d: float, phi_a: float, alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"Blend weight must be in [0, 1], got {alpha}")
    return alpha * phi_d + (1 - alpha) * phi_a


def steering_alpha(fs: FrenetState, config: SteeringConfig, schedule: GainSchedule) -> float:
    """Corridor gate for the wheels, using the wider steering corridor."""
    if not config.corridor_gate:
        return 1.0
    gains = select_gains(fs, config.corridor, schedule)
    return corridor_alpha(lyapunov_value(fs, gains), v1_max(config.corridor, gains))


def mechanical_command(
    vt: VirtualTargetState,
    state: VehicleState,
    fs: FrenetState,
    v: float,
    path: Path,
    config: SteeringConfig,
    schedule: GainSchedule,
    geometry: SteeredGeometry,
    dt: float,
) -> tuple[VirtualTargetState, SteeringCommand]:
    """One tick of the mechanical guidance pipeline up to the wheel targets."""
    next_vt, omega_ref = virtual_target_step(vt, state.pose, v, path, config.gains, dt)
    phi_d = steering_from_omega(omega_ref, v, geometry, config.gains.phi_max_rad)
    phi_a = effective_steering(state.phi_left, state.phi_right, geometry)
    alpha = steering_alpha(fs, config, schedule)
    phi = blend_steering(phi_d, phi_a, alpha)
    phi_left, phi_right = ackermann_split(phi, geometry)

    return next_vt, SteeringCommand(
        omega_ref=omega_ref,
        phi_d=phi_d,
        phi_a=phi_a,
        alpha=alpha,
        phi=phi,
        phi_left=phi_left,
        phi_right=phi_right,
    )
