#!/usr/bin/env python

from enum import StrEnum


class SegmentKind(StrEnum):
    line = "line"
    arc = "arc"


class PathShape(StrEnum):
    I = "I"  # noqa: E741
    C = "C"
    S = "S"


class MirrorMode(StrEnum):
    none = "none"
    mirrored = "mirrored"
    random = "random"


class GuidanceMode(StrEnum):
    haptic = "haptic"
    acoustic = "acoustic"
    binaural = "binaural"
    mechanical = "mechanical"


class GuidanceSymbol(StrEnum):
    left = "left"
    right = "right"
    straight = "straight"


class CueKind(StrEnum):
    none = "none"
    left = "left"
    right = "right"
    straight = "straight"
    target = "target"


class HapticSource(StrEnum):
    omega = "omega"
    sound_point = "sound_point"


###############################################################################
# Bus topics

TOPIC_POSE = "pose"
TOPIC_GUIDANCE_CUE = "guidance_cue"
TOPIC_SOUND_SOURCE = "sound_source"
TOPIC_WHEEL_CMD = "wheel_cmd"

###############################################################################
# Study path geometry

STUDY_LINE_LENGTH_M = 10.0
STUDY_C_RADIUS_M = 6.37
STUDY_S_RADIUS_M = 4.78
# Fractions of a full circle for the three S arcs
STUDY_S_SWEEP_FRACTIONS = (1 / 12, 1 / 6, 1 / 12)
STUDY_I_HEADING_OFFSET_RAD = 0.17453292519943295  # 10 degrees

# Walker speed observed in the field trials, used as the default user speed
FIELD_MEAN_SPEED_M_S = 0.42
