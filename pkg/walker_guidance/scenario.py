#!/usr/bin/env python

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from dataclasses_json import DataClassJsonMixin

from .constants import STUDY_I_HEADING_OFFSET_RAD, GuidanceMode, MirrorMode, PathShape
from .trial import SimulationConfig
from .user import UserModel

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

SCHEMA_VERSION = 1


class ScenarioValidationError(ValueError):
    def __init__(self, field_name: str, message: str) -> None:
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass
class PathEntry(DataClassJsonMixin):
    shape: PathShape
    mirror: MirrorMode = MirrorMode.none


def _all_modes() -> list[GuidanceMode]:
    return list(GuidanceMode)


def _all_paths() -> list[PathEntry]:
    return [PathEntry(shape=shape, mirror=MirrorMode.random) for shape in PathShape]


@dataclass
class Scenario(DataClassJsonMixin):
    schema_version: int = SCHEMA_VERSION
    name: str = "default"
    modes: list[GuidanceMode] = field(default_factory=_all_modes)
    paths: list[PathEntry] = field(default_factory=_all_paths)
    trials_per_cell: int = 10
    seed: int = 0
    output_dir: str = "walker-guidance-results"
    max_workers: int | None = None
    cell_timeout_seconds: int = 600
    i_heading_offset_rad: float = STUDY_I_HEADING_OFFSET_RAD
    user: UserModel = field(default_factory=UserModel)
    simulation: SimulationConfig = field(default_factory=SimulationConfig)


###############################################################################


def validate_scenario(scenario: Scenario) -> Scenario:  # noqa: C901
    """Check cross-field constraints, raising ScenarioValidationError on the first failure."""
    if scenario.schema_version != SCHEMA_VERSION:
        raise ScenarioValidationError(
            "schema_version",
            f"unsupported version {scenario.schema_version}, expected {SCHEMA_VERSION}",
        )
    if len(scenario.modes) == 0:
        raise ScenarioValidationError("modes", "at least one guidance mode is required")
    if len(set(scenario.modes)) != len(scenario.modes):
        raise ScenarioValidationError("modes", "guidance modes must not repeat")
    if len(scenario.paths) == 0:
        raise ScenarioValidationError("paths", "at least one path is required")
    if scenario.trials_per_cell < 1:
        raise ScenarioValidationError(
            "trials_per_cell", f"must be >= 1, got {scenario.trials_per_cell}"
        )
    if scenario.max_workers is not None and scenario.max_workers < 1:
        raise ScenarioValidationError(
            "max_workers", f"must be >= 1, got {scenario.max_workers}"
        )
    if scenario.cell_timeout_seconds <= 0:
        raise ScenarioValidationError(
            "cell_timeout_seconds", f"must be > 0, got {scenario.cell_timeout_seconds}"
        )

    sim = scenario.simulation
    if sim.dt_s <= 0:
        raise ScenarioValidationError("simulation.dt_s", f"must be > 0, got {sim.dt_s}")
    if sim.cue_period_s < sim.dt_s:
        raise ScenarioValidationError(
            "simulation.cue_period_s", f"must be >= dt_s, got {sim.cue_period_s}"
        )
    if sim.timeout_s <= 0:
        raise ScenarioValidationError(
            "simulation.timeout_s", f"must be > 0, got {sim.timeout_s}"
        )
    if sim.lookahead_ds_m <= 0:
        raise ScenarioValidationError(
            "simulation.lookahead_ds_m", f"must be > 0, got {sim.lookahead_ds_m}"
        )
    if sim.binaural_cone_count < 1 or sim.binaural_cone_count % 2 == 0:
        raise ScenarioValidationError(
            "simulation.binaural_cone_count",
            f"must be a positive odd number, got {sim.binaural_cone_count}",
        )
    return scenario


def parse_scenario(document: dict) -> Scenario:
    """Build a validated scenario from a parsed JSON document."""
    known = set(Scenario.__dataclass_fields__)
    unknown = sorted(set(document) - known)
    if unknown:
        raise ScenarioValidationError(unknown[0], "unknown scenario key")

    try:
        return validate_scenario(Scenario.from_dict(document))
    except ScenarioValidationError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        # Nested config classes raise plain ValueErrors from __post_init__
        raise ScenarioValidationError("scenario", str(e)) from e


def load_scenario(config_path: str | Path) -> Scenario:
    config_path = Path(config_path)
    try:
        with open(config_path) as open_file:
            document = json.load(open_file)
    except json.JSONDecodeError as e:
        raise ScenarioValidationError("<document>", f"invalid JSON: {e}") from e

    if not isinstance(document, dict):
        raise ScenarioValidationError("<document>", "a scenario must be a JSON object")

    scenario = parse_scenario(document)
    log.info(f"Loaded scenario '{scenario.name}' from {config_path}")
    return scenario


def apply_overrides(
    scenario: Scenario,
    seed: int | None = None,
    modes: list[str] | None = None,
    shapes: list[str] | None = None,
    trials: int | None = None,
    output_dir: str | Path | None = None,
) -> Scenario:
    """Return a copy of the scenario with command-line overrides and cell filters applied."""
    updated = scenario
    if seed is not None:
        updated = replace(updated, seed=seed)
    if trials is not None:
        updated = replace(updated, trials_per_cell=trials)
    if output_dir is not None:
        updated = replace(updated, output_dir=str(output_dir))
    if modes is not None:
        try:
            wanted_modes = {GuidanceMode(m) for m in modes}
        except ValueError as e:
            raise ScenarioValidationError("modes", str(e)) from e
        updated = replace(updated, modes=[m for m in updated.modes if m in wanted_modes])
    if shapes is not None:
        try:
            wanted_shapes = {PathShape(s) for s in shapes}
        except ValueError as e:
            raise ScenarioValidationError("paths", str(e)) from e
        updated = replace(
            updated, paths=[p for p in updated.paths if p.shape in wanted_shapes]
        )
    return validate_scenario(updated)
