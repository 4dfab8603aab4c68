#!/usr/bin/env python

import logging
from collections import deque
from dataclasses import dataclass, field

from dataclasses_json import DataClassJsonMixin

from .constants import (
    TOPIC_GUIDANCE_CUE,
    TOPIC_POSE,
    TOPIC_SOUND_SOURCE,
    TOPIC_WHEEL_CMD,
    CueKind,
)
from .paths import Pose

###############################################################################

log = logging.getLogger(__name__)

###############################################################################


class UnknownTopicError(KeyError):
    pass


class MessageSchemaError(TypeError):
    pass


@dataclass(frozen=True)
class PoseMessage(DataClassJsonMixin):
    t: float
    pose: Pose


@dataclass(frozen=True)
class GuidanceCue(DataClassJsonMixin):
    t: float
    kind: CueKind
    # Polar sound target (range, azimuth positive right) for binaural cues,
    # rendered in the head frame at the given head yaw
    r: float | None = None
    theta_az: float | None = None
    head_yaw_rad: float = 0.0


@dataclass(frozen=True)
class SoundSourceMessage(DataClassJsonMixin):
    t: float
    r: float
    theta_az: float
    playing: bool


@dataclass(frozen=True)
class WheelCommandMessage(DataClassJsonMixin):
    t: float
    phi_left: float
    phi_right: float


@dataclass(frozen=True)
class BusTopic:
    name: str
    schema: type


@dataclass
class Subscription:
    topic: str
    queue: deque = field(default_factory=deque)

    def __len__(self) -> int:
        return len(self.queue)

    def drain(self) -> list:
        """Pop every pending message, oldest first."""
        messages = list(self.queue)
        self.queue.clear()
        return messages


class MessageBus:
    """Synchronous in-process publish/subscribe bus.

    Every subscriber of a topic receives each message published on it exactly
    once, in publish order. The bus belongs to a single trial and is not
    shared between threads.
    """

    def __init__(self) -> None:
        self._topics: dict[str, BusTopic] = {}
        self._subscriptions: dict[str, list[Subscription]] = {}

    def register(self, topic: BusTopic) -> None:
        existing = self._topics.get(topic.name)
        if existing is not None and existing.schema is not topic.schema:
            raise MessageSchemaError(
                f"Topic '{topic.name}' is already registered with schema "
                f"{existing.schema.__name__}"
            )
        self._topics[topic.name] = topic
        self._subscriptions.setdefault(topic.name, [])

    @property
    def topics(self) -> list[str]:
        return list(self._topics)

    def _topic(self, name: str) -> BusTopic:
        try:
            return self._topics[name]
        except KeyError as e:
            raise UnknownTopicError(f"Topic '{name}' is not registered") from e

    def subscribe(self, name: str) -> Subscription:
        self._topic(name)
        sub = Subscription(topic=name)
        self._subscriptions[name].append(sub)
        return sub

    def publish(self, name: str, message: object) -> None:
        topic = self._topic(name)
        if not isinstance(message, topic.schema):
            raise MessageSchemaError(
                f"Topic '{name}' carries {topic.schema.__name__}, "
                f"got {type(message).__name__}"
            )
        for sub in self._subscriptions[name]:
            sub.queue.append(message)


def make_walker_bus() -> MessageBus:
    """A bus with the four walker topics registered."""
    bus = MessageBus()
    bus.register(BusTopic(TOPIC_POSE, PoseMessage))
    bus.register(BusTopic(TOPIC_GUIDANCE_CUE, GuidanceCue))
    bus.register(BusTopic(TOPIC_SOUND_SOURCE, SoundSourceMessage))
    bus.register(BusTopic(TOPIC_WHEEL_CMD, WheelCommandMessage))
    return bus
