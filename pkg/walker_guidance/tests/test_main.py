#!/usr/bin/env python

import json
import math
from dataclasses import replace
from pathlib import Path

import polars as pl
import pytest

from walker_guidance import main
from walker_guidance.constants import GuidanceMode, MirrorMode, PathShape
from walker_guidance.data import load_preset
from walker_guidance.scenario import PathEntry, Scenario

###############################################################################


def _small_scenario(tmp_path: Path, **kwargs) -> Scenario:
    defaults = {
        "name": "small",
        "modes": [GuidanceMode.mechanical],
        "trials_per_cell": 2,
        "seed": 7,
        "output_dir": str(tmp_path / "results"),
    }
    defaults.update(kwargs)
    return Scenario(**defaults)


###############################################################################


def test_trial_seed_is_stable_and_distinct() -> None:
    assert main.trial_seed(0, 1, 2, 3) == main.trial_seed(0, 1, 2, 3)
    seeds = {
        main.trial_seed(0, m, p, k) for m in range(4) for p in range(3) for k in range(10)
    }
    assert len(seeds) == 120


def test_plan_trial_straight_path_turns_start() -> None:
    offset = 0.17
    entry = PathEntry(PathShape.I, MirrorMode.none)
    headings = set()
    for seed in range(20):
        path, start = main.plan_trial(entry, seed, offset)
        assert path.path_id == "I"
        assert (start.x, start.y) == (0.0, 0.0)
        assert abs(start.theta) == pytest.approx(offset)
        headings.add(math.copysign(1, start.theta))
    assert headings == {-1.0, 1.0}


def test_plan_trial_mirroring() -> None:
    mirrored, start = main.plan_trial(PathEntry(PathShape.C, MirrorMode.mirrored), 0, 0.17)
    assert mirrored.path_id == "C-mirrored"
    assert start.theta == 0.0

    ids = {
        main.plan_trial(PathEntry(PathShape.S, MirrorMode.random), seed, 0.17)[0].path_id
        for seed in range(20)
    }
    assert ids == {"S", "S-mirrored"}


def test_plan_trial_is_deterministic() -> None:
    entry = PathEntry(PathShape.I, MirrorMode.random)
    first_path, first_start = main.plan_trial(entry, 99, 0.17)
    second_path, second_start = main.plan_trial(entry, 99, 0.17)
    assert first_path.path_id == second_path.path_id
    assert first_start == second_start


def test_scenario_cells_order() -> None:
    cells = main.scenario_cells(Scenario())
    assert len(cells) == 12
    assert [c.cell_id for c in cells[:3]] == ["haptic-I", "haptic-C", "haptic-S"]
    assert cells == sorted(cells, key=lambda c: c.sort_key)


###############################################################################


def test_run_scenario_writes_report(tmp_path: Path) -> None:
    scenario = _small_scenario(tmp_path)
    assert main.run_scenario(scenario=scenario) == main.EXIT_OK

    out_dir = tmp_path / "results"
    aggregate = pl.read_csv(out_dir / "aggregate.csv")
    assert aggregate["mode"].to_list() == ["mechanical"]
    assert "error_cm_average" in aggregate.columns
    assert "time_s_S_sem" in aggregate.columns

    cells = pl.read_csv(out_dir / "cells.csv")
    assert len(cells) == 3
    assert cells["shape"].to_list() == ["I", "C", "S"]
    assert cells["complete_trials"].to_list() == [2, 2, 2]

    with open(out_dir / "summary.json") as open_file:
        summary = json.load(open_file)
    assert summary["scenario"] == "small"
    assert summary["errors"] == []
    for name in summary["files"]:
        assert (out_dir / name).stat().st_size > 0
    assert "plots/mechanical-C.svg" in summary["files"]
    assert "traces/mechanical-S-trial01.csv" in summary["files"]
    assert not (out_dir / "errors.csv").exists()


def test_emit_report_without_results_writes_nothing(tmp_path: Path) -> None:
    out_dir = tmp_path / "empty"
    summary = main.emit_report(
        main.ScenarioResults(cells=[], errors=[]), _small_scenario(tmp_path), out_dir
    )
    assert summary.files == []
    assert not out_dir.exists()


def test_failing_cell_is_tracked(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    def _explode(cell: main.Cell, scenario: Scenario) -> main.CellResult:
        raise RuntimeError(f"boom in {cell.cell_id}")

    monkeypatch.setattr(main, "run_cell", _explode)
    scenario = _small_scenario(tmp_path, paths=[PathEntry(PathShape.I)])
    assert main.run_scenario(scenario=scenario) == main.EXIT_RUNTIME_ERROR

    errors = pl.read_csv(tmp_path / "results" / "errors.csv")
    assert errors["cell"].to_list() == ["mechanical-I"]
    assert errors["err"].to_list() == ["boom in mechanical-I"]
    assert "RuntimeError" in errors["tb"][0]


def test_timed_out_cell_has_a_message(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    def _stall(cell: main.Cell, scenario: Scenario) -> main.CellResult:
        raise TimeoutError()

    def _silent(cell: main.Cell, scenario: Scenario) -> main.CellResult:
        raise KeyError

    scenario = _small_scenario(tmp_path, paths=[PathEntry(PathShape.C)], cell_timeout_seconds=5)
    cell = main.scenario_cells(scenario)[0]

    monkeypatch.setattr(main, "run_cell", _stall)
    result = main.run_cell_tracked(cell, scenario)
    assert isinstance(result, main.TrackedErrorResult)
    assert result.err == "Cell exceeded the 5 s time limit"

    monkeypatch.setattr(main, "run_cell", _silent)
    result = main.run_cell_tracked(cell, scenario)
    assert isinstance(result, main.TrackedErrorResult)
    assert result.err == "KeyError()"

    monkeypatch.setattr(main, "run_cell", _stall)
    assert main.run_scenario(scenario=scenario) == main.EXIT_RUNTIME_ERROR
    errors = pl.read_csv(tmp_path / "results" / "errors.csv")
    assert errors["err"].to_list() == ["Cell exceeded the 5 s time limit"]


def test_invalid_config_exit_status(tmp_path: Path) -> None:
    config_path = tmp_path / "bad.json"
    config_path.write_text(json.dumps({"trials_per_cell": 0}))
    assert main.run_scenario(config_path=config_path) == main.EXIT_CONFIG_ERROR
    assert main.run_scenario(config_path=tmp_path / "missing.json") == main.EXIT_CONFIG_ERROR
    assert main.run_scenario() == main.EXIT_CONFIG_ERROR


def test_overrides_filter_cells(tmp_path: Path) -> None:
    config_path = tmp_path / "scenario.json"
    config_path.write_text(json.dumps({"name": "filtered"}))
    status = main.run_scenario(
        config_path=config_path,
        out_dir=tmp_path / "filtered",
        modes=["haptic"],
        shapes=["I"],
        trials=1,
    )
    assert status == main.EXIT_OK
    cells = pl.read_csv(tmp_path / "filtered" / "cells.csv")
    assert cells.select("mode", "shape").rows() == [("haptic", "I")]


def test_default_preset_is_reproducible_and_ranks_mechanical_first(tmp_path: Path) -> None:
    outputs = []
    for run in ("first", "second"):
        scenario = replace(load_preset("default"), output_dir=str(tmp_path / run))
        assert main.run_scenario(scenario=scenario) == main.EXIT_OK
        outputs.append(tmp_path / run)

    first, second = outputs
    metrics_files = sorted(p.name for p in (first / "metrics").glob("*.csv"))
    assert len(metrics_files) == 12
    assert metrics_files == sorted(p.name for p in (second / "metrics").glob("*.csv"))
    for name in metrics_files:
        first_bytes = (first / "metrics" / name).read_bytes()
        assert first_bytes == (second / "metrics" / name).read_bytes(), name
    for name in ("aggregate.csv", "cells.csv", "plots/acoustic-C.svg"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name

    aggregate = pl.read_csv(first / "aggregate.csv")
    assert aggregate["mode"].to_list() == ["haptic", "acoustic", "binaural", "mechanical"]
    errors = dict(zip(aggregate["mode"], aggregate["error_cm_average"], strict=True))
    assert errors["mechanical"] == min(errors.values())
