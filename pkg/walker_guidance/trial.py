#!/usr/bin/env python

import logging
from dataclasses import dataclass, field

import numpy as np
import polars as pl
from dataclasses_json import DataClassJsonMixin

from .bus import (
    GuidanceCue,
    MessageBus,
    PoseMessage,
    SoundSourceMessage,
    WheelCommandMessage,
    make_walker_bus,
)
from .constants import (
    TOPIC_GUIDANCE_CUE,
    TOPIC_POSE,
    TOPIC_SOUND_SOURCE,
    TOPIC_WHEEL_CMD,
    CueKind,
    GuidanceMode,
    GuidanceSymbol,
    HapticSource,
)
from .guidance import CorridorParams, GainSchedule, GuidanceDecision, evaluate_guidance
from .kinematics import (
    SteeredGeometry,
    VehicleState,
    step_steered,
    step_unicycle,
    wheel_servo_step,
)
from .paths import FrenetState, Path, Pose, project
from .sound_target import (
    HeadMotionProfile,
    HeadState,
    UndefinedBearingError,
    azimuth,
    binaural_quantize,
    classify_lr,
    head_compensate,
    head_yaw,
    make_cone_set,
    make_sound_target,
)
from .steering import (
    SteeringConfig,
    VirtualTargetState,
    init_virtual_target,
    mechanical_command,
)
from .user import UserModel, init_user, user_step

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

COMPLETION_TOLERANCE_M = 1e-9

TRACE_CSV_COLUMNS = [
    "t",
    "x",
    "y",
    "theta",
    "y_d",
    "theta_d",
    "cue",
    "phi_left",
    "phi_right",
]


@dataclass
class SimulationConfig(DataClassJsonMixin):
    dt_s: float = 0.01
    cue_period_s: float = 0.15
    timeout_s: float = 120.0
    lookahead_ds_m: float = 1.2
    binaural_cone_count: int = 7
    haptic_source: HapticSource = HapticSource.omega
    head_motion: HeadMotionProfile = field(default_factory=HeadMotionProfile)
    corridor: CorridorParams = field(default_factory=CorridorParams)
    gain_schedule: GainSchedule = field(default_factory=GainSchedule)
    steering: SteeringConfig = field(default_factory=SteeringConfig)
    geometry: SteeredGeometry = field(default_factory=SteeredGeometry)

    @property
    def cue_every_steps(self) -> int:
        return max(1, round(self.cue_period_s / self.dt_s))


@dataclass(frozen=True, slots=True)
class TraceSample:
    t: float
    x: float
    y: float
    theta: float
    y_d: float
    theta_d: float
    s_star: float
    cue: str
    phi_left: float | None = None
    phi_right: float | None = None
    sound_r: float | None = None
    sound_theta_az: float | None = None
    sound_playing: bool | None = None


@dataclass
class TrialTrace:
    mode: GuidanceMode
    path_id: str
    samples: list[TraceSample]
    complete: bool = True
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.samples)

    def to_dataframe(self) -> pl.DataFrame:
        return pl.DataFrame(
            self.samples,
            schema={
                "t": pl.Float64,
                "x": pl.Float64,
                "y": pl.Float64,
                "theta": pl.Float64,
                "y_d": pl.Float64,
                "theta_d": pl.Float64,
                "s_star": pl.Float64,
                "cue": pl.Utf8,
                "phi_left": pl.Float64,
                "phi_right": pl.Float64,
                "sound_r": pl.Float64,
                "sound_theta_az": pl.Float64,
                "sound_playing": pl.Boolean,
            },
        )

    def to_csv(self, path: str) -> None:
        self.to_dataframe().select(TRACE_CSV_COLUMNS).write_csv(path)

    @property
    def positions(self) -> np.ndarray:
        return np.array([(s.x, s.y) for s in self.samples])


###############################################################################


def haptic_cue(
    t: float,
    decision: GuidanceDecision,
    pose: Pose,
    fs: FrenetState,
    path: Path,
    config: SimulationConfig,
) -> GuidanceCue:
    if not decision.emit:
        return GuidanceCue(t=t, kind=CueKind.none)

    if config.haptic_source == HapticSource.sound_point:
        target = make_sound_target(pose, fs, path, config.lookahead_ds_m)
        kind = CueKind.left if target.s_cw[1] > 0 else CueKind.right
        return GuidanceCue(t=t, kind=kind)

    kind = CueKind.left if decision.symbol == GuidanceSymbol.left else CueKind.right
    return GuidanceCue(t=t, kind=kind)


def acoustic_cue(
    t: float,
    decision: GuidanceDecision,
    pose: Pose,
    fs: FrenetState,
    path: Path,
    config: SimulationConfig,
    bus: MessageBus,
) -> GuidanceCue:
    target = make_sound_target(pose, fs, path, config.lookahead_ds_m)
    bus.publish(
        TOPIC_SOUND_SOURCE,
        SoundSourceMessage(t=t, r=target.r, theta_az=target.theta_az, playing=decision.emit),
    )
    if not decision.emit:
        return GuidanceCue(t=t, kind=CueKind.none)
    return GuidanceCue(t=t, kind=CueKind(classify_lr(target.s_cw).value))


def binaural_cue(
    t: float,
    decision: GuidanceDecision,
    pose: Pose,
    fs: FrenetState,
    path: Path,
    config: SimulationConfig,
    bus: MessageBus,
) -> GuidanceCue:
    target = make_sound_target(pose, fs, path, config.lookahead_ds_m)
    theta_i = head_yaw(t, config.head_motion)
    s_s = binaural_quantize(target.s_cw, make_cone_set(config.binaural_cone_count))
    s_p = head_compensate(s_s, HeadState(theta_i))
    r = float(np.hypot(*s_p))

    # The source only plays outside the corridor gate
    playing = decision.alpha >= 1.0
    bus.publish(
        TOPIC_SOUND_SOURCE,
        SoundSourceMessage(t=t, r=r, theta_az=azimuth(s_p), playing=playing),
    )
    if not playing:
        return GuidanceCue(t=t, kind=CueKind.none)
    return GuidanceCue(
        t=t,
        kind=CueKind.target,
        r=r,
        theta_az=azimuth(s_p),
        head_yaw_rad=theta_i,
    )


def passive_cue(
    mode: GuidanceMode,
    t: float,
    pose: Pose,
    fs: FrenetState,
    v: float,
    path: Path,
    config: SimulationConfig,
    bus: MessageBus,
) -> GuidanceCue:
    """Compute the cue of one 150 ms tick for the haptic, acoustic or binaural mode."""
    decision = evaluate_guidance(fs, v, config.gain_schedule, config.corridor)
    try:
        if mode == GuidanceMode.haptic:
            return haptic_cue(t, decision, pose, fs, path, config)
        if mode == GuidanceMode.acoustic:
            return acoustic_cue(t, decision, pose, fs, path, config, bus)
        return binaural_cue(t, decision, pose, fs, path, config, bus)
    except UndefinedBearingError:
        log.debug(f"Sound point coincides with the walker at t={t:.2f}, staying silent")
        return GuidanceCue(t=t, kind=CueKind.none)


###############################################################################


def run_trial(
    mode: GuidanceMode | str,
    path: Path,
    start: Pose,
    user: UserModel,
    config: SimulationConfig,
    seed: int = 0,
) -> TrialTrace:
    """Simulate one walk along a path under one guidance mode.

    The walk ends when the projection foot reaches the end of the path, or
    after `config.timeout_s` in which case the trace is flagged incomplete.
    Poses, cues, sound sources and wheel commands all travel over a private
    message bus.
    """
    mode = GuidanceMode(mode)
    dt = config.dt_s
    total_length = path.total_length
    cue_every = config.cue_every_steps
    max_steps = int(round(config.timeout_s / dt))

    bus = make_walker_bus()
    pose_sub = bus.subscribe(TOPIC_POSE)
    cue_sub = bus.subscribe(TOPIC_GUIDANCE_CUE)
    wheel_sub = bus.subscribe(TOPIC_WHEEL_CMD)
    sound_sub = bus.subscribe(TOPIC_SOUND_SOURCE)

    user_state = init_user(user, seed)
    v = user_state.speed

    vehicle = VehicleState(pose=start)
    fs = project(path, start)
    vt: VirtualTargetState | None = None
    if mode == GuidanceMode.mechanical:
        vt = init_virtual_target(path, start)

    samples: list[TraceSample] = []
    cue_kind = CueKind.none
    sound: SoundSourceMessage | None = None
    complete = False
    step = 0
    while True:
        t = step * dt
        pose = vehicle.pose
        bus.publish(TOPIC_POSE, PoseMessage(t=t, pose=pose))

        is_mechanical = mode == GuidanceMode.mechanical
        samples.append(
            TraceSample(
                t=t,
                x=pose.x,
                y=pose.y,
                theta=pose.theta,
                y_d=fs.y_d,
                theta_d=fs.theta_d,
                s_star=fs.s_star,
                cue=cue_kind.value,
                phi_left=vehicle.phi_left if is_mechanical else None,
                phi_right=vehicle.phi_right if is_mechanical else None,
                sound_r=None if sound is None else sound.r,
                sound_theta_az=None if sound is None else sound.theta_az,
                sound_playing=None if sound is None else sound.playing,
            )
        )

        if fs.s_star >= total_length - COMPLETION_TOLERANCE_M:
            complete = True
            break
        if step >= max_steps:
            log.warning(
                f"Trial {mode.value} on path {path.path_id} (seed {seed}) "
                f"timed out after {t:.1f} s at s={fs.s_star:.2f} m"
            )
            break

        # Controllers act on the latest pose received over the bus
        latest_pose = pose_sub.drain()[-1].pose

        if is_mechanical:
            assert vt is not None
            vt, command = mechanical_command(
                vt,
                VehicleState(latest_pose, vehicle.phi_left, vehicle.phi_right),
                fs,
                v,
                path,
                config.steering,
                config.gain_schedule,
                config.geometry,
                dt,
            )
            bus.publish(
                TOPIC_WHEEL_CMD,
                WheelCommandMessage(
                    t=t, phi_left=command.phi_left, phi_right=command.phi_right
                ),
            )
        elif step % cue_every == 0:
            cue = passive_cue(mode, t, latest_pose, fs, v, path, config, bus)
            cue_kind = cue.kind
            bus.publish(TOPIC_GUIDANCE_CUE, cue)

            # A tick without a published source leaves the trace silent
            sources = sound_sub.drain()
            sound = sources[-1] if sources else None

        received = cue_sub.drain()
        v, omega = user_step(
            mode,
            received[-1] if received else None,
            user_state,
            user,
            dt,
        )

        if is_mechanical:
            wheel_targets = wheel_sub.drain()[-1]
            rate = config.geometry.servo_max_rate_rad_s
            vehicle = VehicleState(
                pose=vehicle.pose,
                phi_left=wheel_servo_step(
                    vehicle.phi_left, wheel_targets.phi_left, rate, dt, config.geometry
                ),
                phi_right=wheel_servo_step(
                    vehicle.phi_right, wheel_targets.phi_right, rate, dt, config.geometry
                ),
            )
            vehicle = step_steered(vehicle, v, config.geometry, dt)
        else:
            vehicle = VehicleState(pose=step_unicycle(vehicle.pose, v, omega, dt))

        fs = project(path, vehicle.pose, s_hint=fs.s_star)
        step += 1

    log.debug(
        f"Trial {mode.value} on path {path.path_id} (seed {seed}) finished "
        f"after {len(samples)} samples, complete={complete}"
    )
    return TrialTrace(
        mode=mode,
        path_id=path.path_id,
        samples=samples,
        complete=complete,
        seed=seed,
    )
