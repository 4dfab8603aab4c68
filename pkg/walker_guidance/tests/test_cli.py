#!/usr/bin/env python

import json
from pathlib import Path

import polars as pl
import pytest

from walker_guidance.bin import cli
from walker_guidance.main import EXIT_CONFIG_ERROR, EXIT_OK

###############################################################################


def test_cli_arguments() -> None:
    args = cli.get_cli_arguments(
        ["run", "default", "--modes", "haptic, mechanical", "--paths", "C", "--seed", "3"]
    )
    assert args.command == "run"
    assert args.config == "default"
    assert args.modes == ["haptic", "mechanical"]
    assert args.paths == ["C"]
    assert args.seed == 3
    assert args.trials is None
    assert args.out is None


def test_cli_verbosity_flags_are_exclusive() -> None:
    with pytest.raises(SystemExit):
        cli.get_cli_arguments(["run", "default", "-v", "-q"])


def test_cli_runs_scenario_file(tmp_path: Path) -> None:
    config_path = tmp_path / "scenario.json"
    config_path.write_text(json.dumps({"name": "cli", "seed": 1}))
    out_dir = tmp_path / "out"

    status = cli.main(
        [
            "run",
            str(config_path),
            "--out",
            str(out_dir),
            "--modes",
            "mechanical",
            "--paths",
            "I,S",
            "--trials",
            "1",
            "--quiet",
        ]
    )
    assert status == EXIT_OK
    cells = pl.read_csv(out_dir / "cells.csv")
    assert cells.select("mode", "shape").rows() == [("mechanical", "I"), ("mechanical", "S")]


def test_cli_runs_preset(tmp_path: Path) -> None:
    out_dir = tmp_path / "study-2"
    status = cli.main(
        ["run", "study-2", "--out", str(out_dir), "--paths", "C", "--trials", "1", "-q"]
    )
    assert status == EXIT_OK
    aggregate = pl.read_csv(out_dir / "aggregate.csv")
    assert aggregate["mode"].to_list() == ["haptic", "acoustic"]


def test_cli_invalid_config(tmp_path: Path) -> None:
    config_path = tmp_path / "scenario.json"
    config_path.write_text(json.dumps({"modes": ["telepathic"]}))
    assert cli.main(["run", str(config_path), "-q"]) == EXIT_CONFIG_ERROR
    assert cli.main(["run", "no-such-preset", "-q"]) == EXIT_CONFIG_ERROR
    assert cli.main(["run", "default", "--modes", "telepathic", "-q"]) == EXIT_CONFIG_ERROR
