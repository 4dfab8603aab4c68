#!/usr/bin/env python

import logging
import math
from dataclasses import dataclass

from dataclasses_json import DataClassJsonMixin

from .constants import GuidanceSymbol
from .paths import FrenetState
from .utils import sinc

###############################################################################

log = logging.getLogger(__name__)

###############################################################################


class GuidanceSuspendedError(ValueError):
    pass


class CorridorConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GuidanceGains(DataClassJsonMixin):
    k_y: float
    k_theta: float
    q_theta: float = 1.0

    def __post_init__(self) -> None:
        if min(self.k_y, self.k_theta, self.q_theta) <= 0:
            raise ValueError(f"Guidance gains must all be > 0, got {self}")


@dataclass
class GainSchedule(DataClassJsonMixin):
    inside_k_y: float = 0.1
    inside_k_theta: float = 1.0
    outside_k_y: float = 1.0
    outside_k_theta: float = 0.1
    q_theta: float = 1.0

    @property
    def inside(self) -> GuidanceGains:
        return GuidanceGains(self.inside_k_y, self.inside_k_theta, self.q_theta)

    @property
    def outside(self) -> GuidanceGains:
        return GuidanceGains(self.outside_k_y, self.outside_k_theta, self.q_theta)


@dataclass
class CorridorParams(DataClassJsonMixin):
    y_h_m: float = 0.3
    theta_h_rad: float = 0.52
    t_omega_rad_s: float = 0.1

    def __post_init__(self) -> None:
        if self.y_h_m <= 0:
            raise CorridorConfigError(f"y_h_m must be > 0, got {self.y_h_m}")
        if not 0 < self.theta_h_rad < math.pi:
            raise CorridorConfigError(f"theta_h_rad must be in (0, pi), got {self.theta_h_rad}")
        if self.t_omega_rad_s < 0:
            raise CorridorConfigError(f"t_omega_rad_s must be >= 0, got {self.t_omega_rad_s}")


@dataclass(frozen=True)
class GuidanceDecision(DataClassJsonMixin):
    gains: GuidanceGains
    v1: float
    v1_max: float
    alpha: float
    omega_d: float
    omega: float
    symbol: GuidanceSymbol
    emit: bool


###############################################################################


def lyapunov_value_of(y_d: float, theta_d: float, gains: GuidanceGains) -> float:
    return 0.5 * (gains.k_y * y_d * y_d + gains.k_theta * theta_d * theta_d)


def lyapunov_value(fs: FrenetState, gains: GuidanceGains) -> float:
    """Quadratic control Lyapunov function V1 = (k_y y_d^2 + k_theta theta_d^2) / 2."""
    return lyapunov_value_of(fs.y_d, fs.theta_d, gains)


def select_gains(
    fs: FrenetState,
    corridor: CorridorParams,
    schedule: GainSchedule | None = None,
) -> GuidanceGains:
    """Pick the inside-corridor gain pair when |y_d| <= y_h, else the outside pair."""
    if schedule is None:
        schedule = GainSchedule()
    if abs(fs.y_d) <= corridor.y_h_m:
        return schedule.inside
    return schedule.outside


def desired_omega(fs: FrenetState, v: float, gains: GuidanceGains) -> float:
    """Angular velocity that makes V1 decrease.

    omega_d = -q_theta theta_d - (k_y / k_theta) y_d sinc(theta_d) v
    """
    if v <= 0:
        raise GuidanceSuspendedError(f"Guidance is suspended at walker speed {v} m/s")
    return (
        -gains.q_theta * fs.theta_d
        - (gains.k_y / gains.k_theta) * fs.y_d * sinc(fs.theta_d) * v
    )


def v1_max(corridor: CorridorParams, gains: GuidanceGains) -> float:
    """V1 at the corridor boundary (y_h, theta_h) for the given gains."""
    return lyapunov_value_of(corridor.y_h_m, corridor.theta_h_rad, gains)


def corridor_alpha(v1: float, v1_max: float) -> float:
    if v1_max <= 0:
        raise CorridorConfigError(f"V1max must be > 0, got {v1_max}")
    return min(1.0, max(0.0, v1 / v1_max))


def quantize(omega: float, t_omega: float) -> GuidanceSymbol:
    if omega > t_omega:
        return GuidanceSymbol.left
    if omega < -t_omega:
        return GuidanceSymbol.right
    return GuidanceSymbol.straight


def evaluate_guidance(
    fs: FrenetState,
    v: float,
    schedule: GainSchedule,
    corridor: CorridorParams,
) -> GuidanceDecision:
    """Run the full quantized guidance law for one cue tick."""
    gains = select_gains(fs, corridor, schedule)
    v1 = lyapunov_value(fs, gains)
    # V1max follows whichever gain pair is currently active
    v1_boundary = v1_max(corridor, gains)
    alpha = corridor_alpha(v1, v1_boundary)
    omega_d = desired_omega(fs, v, gains)
    omega = alpha * omega_d
    symbol = quantize(omega, corridor.t_omega_rad_s)

    return GuidanceDecision(
        gains=gains,
        v1=v1,
        v1_max=v1_boundary,
        alpha=alpha,
        omega_d=omega_d,
        omega=omega,
        symbol=symbol,
        emit=symbol != GuidanceSymbol.straight,
    )
