"""Stored scenario presets."""

from __future__ import annotations

import json
from pathlib import Path

from ..scenario import Scenario, ScenarioValidationError, parse_scenario

###############################################################################
# Local storage paths

DATA_FILES_DIR = Path(__file__).parent / "files"

DEFAULT_SCENARIO_JSON = DATA_FILES_DIR / "default-scenario.json"
STUDY_2_SCENARIO_JSON = DATA_FILES_DIR / "study-2-scenario.json"

PRESETS = {
    "default": DEFAULT_SCENARIO_JSON,
    "study-2": STUDY_2_SCENARIO_JSON,
}

###############################################################################


def load_preset(name: str) -> Scenario:
    """Read one of the bundled scenario presets."""
    if name not in PRESETS:
        raise ScenarioValidationError(
            "<preset>", f"unknown preset '{name}', expected one of {sorted(PRESETS)}"
        )

    with open(PRESETS[name]) as open_file:
        return parse_scenario(json.load(open_file))
