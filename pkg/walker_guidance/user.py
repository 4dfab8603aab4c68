#!/usr/bin/env python

import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from dataclasses_json import DataClassJsonMixin

from .bus import GuidanceCue
from .constants import FIELD_MEAN_SPEED_M_S, CueKind, GuidanceMode

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

MIN_SPEED_M_S = 0.05
TIME_TOLERANCE_S = 1e-9


@dataclass
class UserModel(DataClassJsonMixin):
    reaction_delay_s: float = 0.4
    turn_rate_rad_s: float = 0.5
    heading_noise_std_rad_sqrt_s: float = 0.05
    speed_mean_m_s: float = FIELD_MEAN_SPEED_M_S
    speed_std_m_s: float = 0.05
    binaural_gain_per_s: float = 0.8

    def __post_init__(self) -> None:
        for name, value in self.to_dict().items():
            if value < 0:
                raise ValueError(f"User model field {name} must be >= 0, got {value}")
        if self.speed_mean_m_s <= 0:
            raise ValueError(f"speed_mean_m_s must be > 0, got {self.speed_mean_m_s}")


@dataclass
class UserState:
    rng: np.random.Generator
    speed: float
    t: float = 0.0
    # Received cues not yet acted on, oldest first
    pending: deque = field(default_factory=deque)
    active: GuidanceCue | None = None


def init_user(model: UserModel, seed: int | np.random.SeedSequence) -> UserState:
    """Create a user whose push speed is drawn once for the whole trial."""
    rng = np.random.default_rng(seed)
    speed = float(rng.normal(model.speed_mean_m_s, model.speed_std_m_s))
    return UserState(rng=rng, speed=max(speed, MIN_SPEED_M_S))


def _perceived_cue(state: UserState, delay: float) -> GuidanceCue | None:
    # The user reacts to the latest cue issued at least `delay` seconds ago
    while state.pending and state.pending[0].t <= state.t - delay + TIME_TOLERANCE_S:
        state.active = state.pending.popleft()
    return state.active


def cue_turn_rate(mode: GuidanceMode, cue: GuidanceCue | None, model: UserModel) -> float:
    """Voluntary heading rate produced by one perceived cue."""
    if cue is None or mode == GuidanceMode.mechanical:
        return 0.0

    if cue.kind == CueKind.left:
        return model.turn_rate_rad_s
    if cue.kind == CueKind.right:
        return -model.turn_rate_rad_s
    if cue.kind == CueKind.target and cue.theta_az is not None:
        # Head-frame azimuth back to the walker frame (azimuth is positive right)
        walker_azimuth = cue.theta_az - cue.head_yaw_rad
        return -model.binaural_gain_per_s * walker_azimuth
    return 0.0


def user_step(
    mode: GuidanceMode,
    cue: GuidanceCue | None,
    state: UserState,
    model: UserModel,
    dt: float,
) -> tuple[float, float]:
    """Advance the simulated user by one step.

    Parameters
    ----------
    mode : GuidanceMode
        Guidance system in use.
    cue : GuidanceCue, optional
        Cue delivered during this step, if any. Cues persist until replaced.
    state : UserState
        Mutable user state (clock, RNG, cue queue).
    model : UserModel
        Behaviour parameters.
    dt : float
        Step length in seconds.

    Returns
    -------
    tuple[float, float]
        Push speed v (m/s) and heading rate omega (rad/s).
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    if cue is not None:
        state.pending.append(cue)

    perceived = _perceived_cue(state, model.reaction_delay_s)
    omega = cue_turn_rate(mode, perceived, model)

    if mode != GuidanceMode.mechanical and model.heading_noise_std_rad_sqrt_s > 0:
        increment = state.rng.normal(0.0, model.heading_noise_std_rad_sqrt_s * math.sqrt(dt))
        omega += float(increment) / dt

    state.t += dt
    return state.speed, omega
