#!/usr/bin/env python

import json
import logging
import traceback
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import polars as pl
from dataclasses_json import DataClassJsonMixin
from scipy import stats
from timeout_function_decorator import timeout
from tqdm import tqdm

from . import paths, plotting
from .constants import GuidanceMode, MirrorMode, PathShape
from .metrics import compute_metrics
from .scenario import (
    PathEntry,
    Scenario,
    ScenarioValidationError,
    apply_overrides,
    load_scenario,
)
from .trial import TrialTrace, run_trial

###############################################################################

log = logging.getLogger(__name__)

###############################################################################

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3

AGGREGATE_METRICS = ("error_cm", "time_s", "length_m", "speed_m_s")

###############################################################################


@dataclass(frozen=True)
class Cell:
    mode: GuidanceMode
    mode_index: int
    entry: PathEntry
    path_index: int

    @property
    def cell_id(self) -> str:
        return f"{self.mode.value}-{self.entry.shape.value}"

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.mode_index, self.path_index)


@dataclass
class TrialResult(DataClassJsonMixin):
    mode: str
    shape: str
    path_id: str
    trial: int
    seed: int
    error_m: float
    error_cm: float
    time_s: float
    length_m: float
    speed_m_s: float
    complete: bool


@dataclass
class CellResult:
    cell: Cell
    trials: list[TrialResult]
    traces: list[TrialTrace]
    planned_paths: list[paths.Path]


@dataclass
class TrackedErrorResult(DataClassJsonMixin):
    cell: str
    err: str
    tb: str


@dataclass
class CellCompletion(DataClassJsonMixin):
    cell: str
    trials: int
    complete_trials: int


@dataclass
class RunSummary(DataClassJsonMixin):
    scenario: str
    seed: int
    files: list[str] = field(default_factory=list)
    cells: list[CellCompletion] = field(default_factory=list)
    errors: list[TrackedErrorResult] = field(default_factory=list)


@dataclass
class ScenarioResults:
    cells: list[CellResult]
    errors: list[TrackedErrorResult]


###############################################################################


def trial_seed(seed: int, mode_index: int, path_index: int, trial_index: int) -> int:
    """Independent, reproducible seed for one trial of one cell."""
    sequence = np.random.SeedSequence([seed, mode_index, path_index, trial_index])
    return int(sequence.generate_state(1)[0])


def plan_trial(
    entry: PathEntry,
    seed: int,
    i_heading_offset_rad: float,
) -> tuple[paths.Path, paths.Pose]:
    """Pick the path variation and start pose of one trial.

    Straight-path trials start turned left or right by the heading offset;
    curved paths start on the path, aligned with it.
    """
    rng = np.random.default_rng([seed, 1])
    if entry.mirror == MirrorMode.random:
        mirrored = bool(rng.random() < 0.5)
    else:
        mirrored = entry.mirror == MirrorMode.mirrored

    path = paths.make_study_path(entry.shape, mirrored=mirrored)
    start = path.start_pose
    if entry.shape == PathShape.I:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        start = paths.Pose(start.x, start.y, start.theta + sign * i_heading_offset_rad)
    return path, start


def run_cell(cell: Cell, scenario: Scenario) -> CellResult:
    trial_results = []
    traces = []
    planned: dict[str, paths.Path] = {}
    for trial_index in range(scenario.trials_per_cell):
        seed = trial_seed(scenario.seed, cell.mode_index, cell.path_index, trial_index)
        path, start = plan_trial(cell.entry, seed, scenario.i_heading_offset_rad)
        planned.setdefault(path.path_id, path)

        trace = run_trial(
            mode=cell.mode,
            path=path,
            start=start,
            user=scenario.user,
            config=scenario.simulation,
            seed=seed,
        )
        trial_metrics = compute_metrics(trace, path)
        trial_results.append(
            TrialResult(
                mode=cell.mode.value,
                shape=cell.entry.shape.value,
                path_id=path.path_id,
                trial=trial_index,
                seed=seed,
                error_m=trial_metrics.error_m,
                error_cm=trial_metrics.error_m * 100,
                time_s=trial_metrics.time_s,
                length_m=trial_metrics.length_m,
                speed_m_s=trial_metrics.speed_m_s,
                complete=trial_metrics.complete,
            )
        )
        traces.append(trace)

    return CellResult(
        cell=cell,
        trials=trial_results,
        traces=traces,
        planned_paths=[planned[k] for k in sorted(planned)],
    )


def run_cell_tracked(cell: Cell, scenario: Scenario) -> CellResult | TrackedErrorResult:
    # Wrap with the per-cell wall-clock guard
    @timeout(scenario.cell_timeout_seconds)  # type: ignore
    def _run_cell_with_timeout(cell: Cell, scenario: Scenario) -> CellResult:
        return run_cell(cell, scenario)

    try:
        return _run_cell_with_timeout(cell, scenario)
    except Exception as e:
        err = str(e)
        if not err and isinstance(e, TimeoutError):
            err = f"Cell exceeded the {scenario.cell_timeout_seconds} s time limit"
        elif not err:
            err = repr(e)

        return TrackedErrorResult(
            cell=cell.cell_id,
            err=err,
            tb=traceback.format_exc(),
        )


def scenario_cells(scenario: Scenario) -> list[Cell]:
    return [
        Cell(mode=mode, mode_index=mode_index, entry=entry, path_index=path_index)
        for mode_index, mode in enumerate(scenario.modes)
        for path_index, entry in enumerate(scenario.paths)
    ]


def simulate_scenario(scenario: Scenario) -> ScenarioResults:
    """Run every (mode, path) cell of a scenario on a bounded thread pool."""
    cells = scenario_cells(scenario)
    results: list[CellResult] = []
    errors: list[TrackedErrorResult] = []

    log.info(
        f"Running scenario '{scenario.name}': {len(cells)} cells x "
        f"{scenario.trials_per_cell} trials (seed {scenario.seed})"
    )
    with ThreadPoolExecutor(max_workers=scenario.max_workers) as executor:
        future_to_cell = {
            executor.submit(run_cell_tracked, cell, scenario): cell for cell in cells
        }

        for future in tqdm(
            as_completed(future_to_cell),
            total=len(cells),
            desc="Simulating cells",
            unit="cell",
            leave=False,
        ):
            cell = future_to_cell[future]
            try:
                result = future.result()
                if isinstance(result, TrackedErrorResult):
                    log.warning(f"Cell {cell.cell_id} failed: {result.err}")
                    errors.append(result)
                else:
                    results.append(result)

            except Exception as e:
                errors.append(
                    TrackedErrorResult(
                        cell=cell.cell_id,
                        err=str(e),
                        tb=traceback.format_exc(),
                    )
                )

    # Completion order depends on scheduling, output must not
    results.sort(key=lambda r: r.cell.sort_key)
    errors.sort(key=lambda e: e.cell)
    return ScenarioResults(cells=results, errors=errors)


###############################################################################


def trials_dataframe(results: list[CellResult]) -> pl.DataFrame:
    return pl.DataFrame([t.to_dict() for r in results for t in r.trials])


def _mean_and_sem(values: list[float]) -> tuple[float, float]:
    if len(values) < 2:
        return float(np.mean(values)), float("nan")
    return float(np.mean(values)), float(stats.sem(values))


def cells_table(results: list[CellResult]) -> pl.DataFrame:
    """One row per (mode, shape) cell with trial means and standard errors."""
    rows = []
    for result in results:
        row: dict[str, str | int | float] = {
            "mode": result.cell.mode.value,
            "shape": result.cell.entry.shape.value,
            "trials": len(result.trials),
            "complete_trials": sum(t.complete for t in result.trials),
        }
        for metric in AGGREGATE_METRICS:
            mean, sem = _mean_and_sem([getattr(t, metric) for t in result.trials])
            row[metric] = mean
            row[f"{metric}_sem"] = sem
        rows.append(row)
    return pl.DataFrame(rows)


def aggregate_table(results: list[CellResult]) -> pl.DataFrame:
    """Rows per guidance mode, columns per metric and path shape plus their average."""
    modes = list(dict.fromkeys(r.cell.mode for r in results))
    shapes = list(dict.fromkeys(r.cell.entry.shape for r in results))

    rows = []
    for mode in modes:
        mode_results = [r for r in results if r.cell.mode == mode]
        row: dict[str, str | float] = {"mode": mode.value}
        for metric in AGGREGATE_METRICS:
            for shape in shapes:
                values = [
                    getattr(t, metric)
                    for r in mode_results
                    if r.cell.entry.shape == shape
                    for t in r.trials
                ]
                mean, sem = _mean_and_sem(values) if values else (float("nan"), float("nan"))
                row[f"{metric}_{shape.value}"] = mean
                row[f"{metric}_{shape.value}_sem"] = sem

            all_values = [getattr(t, metric) for r in mode_results for t in r.trials]
            mean, sem = _mean_and_sem(all_values)
            row[f"{metric}_average"] = mean
            row[f"{metric}_average_sem"] = sem
        rows.append(row)
    return pl.DataFrame(rows)


def emit_report(
    results: ScenarioResults,
    scenario: Scenario,
    out_dir: str | Path,
) -> RunSummary:
    """Write traces, per-cell metrics, aggregate tables, plots and the run summary.

    Parameters
    ----------
    results : ScenarioResults
        Cells and tracked errors from `simulate_scenario`.
    scenario : Scenario
        The scenario that was run.
    out_dir : str | Path
        Output directory, created when missing.

    Returns
    -------
    RunSummary
        Every written file (relative to `out_dir`), per-cell completion counts
        and the tracked errors.
    """
    out_dir = Path(out_dir)
    summary = RunSummary(scenario=scenario.name, seed=scenario.seed, errors=results.errors)

    if len(results.cells) == 0:
        log.warning("No completed cells, nothing to report")
    else:
        out_dir.mkdir(parents=True, exist_ok=True)
        for sub_dir in ("traces", "metrics", "plots"):
            (out_dir / sub_dir).mkdir(exist_ok=True)

        for result in results.cells:
            cell_id = result.cell.cell_id
            for trial, trace in zip(result.trials, result.traces, strict=True):
                trace_file = Path("traces") / f"{cell_id}-trial{trial.trial:02d}.csv"
                trace.to_csv(str(out_dir / trace_file))
                summary.files.append(trace_file.as_posix())

            metrics_file = Path("metrics") / f"{cell_id}.csv"
            pl.DataFrame([t.to_dict() for t in result.trials]).write_csv(out_dir / metrics_file)
            summary.files.append(metrics_file.as_posix())

            plot_file = Path("plots") / f"{cell_id}.svg"
            plotting.plot_trajectories(
                result.planned_paths,
                result.traces,
                out_dir / plot_file,
                title=cell_id,
            )
            summary.files.append(plot_file.as_posix())

            summary.cells.append(
                CellCompletion(
                    cell=cell_id,
                    trials=len(result.trials),
                    complete_trials=sum(t.complete for t in result.trials),
                )
            )

        cells_table(results.cells).write_csv(out_dir / "cells.csv")
        aggregate_table(results.cells).write_csv(out_dir / "aggregate.csv")
        summary.files.extend(["cells.csv", "aggregate.csv"])

    if len(results.errors) > 0:
        out_dir.mkdir(parents=True, exist_ok=True)
        pl.DataFrame([e.to_dict() for e in results.errors]).write_csv(out_dir / "errors.csv")
        summary.files.append("errors.csv")

    if len(summary.files) > 0:
        with open(out_dir / "summary.json", "w") as open_file:
            json.dump(summary.to_dict(), open_file, indent=4)
        log.info(f"Wrote {len(summary.files)} files to {out_dir}")

    return summary


def run_scenario(
    config_path: str | Path | None = None,
    scenario: Scenario | None = None,
    out_dir: str | Path | None = None,
    seed: int | None = None,
    modes: list[str] | None = None,
    shapes: list[str] | None = None,
    trials: int | None = None,
) -> int:
    """Load, simulate and report a scenario; return the process exit status."""
    try:
        if scenario is None:
            if config_path is None:
                raise ScenarioValidationError("<document>", "no scenario given")
            scenario = load_scenario(config_path)
        scenario = apply_overrides(
            scenario,
            seed=seed,
            modes=modes,
            shapes=shapes,
            trials=trials,
            output_dir=out_dir,
        )
    except ScenarioValidationError as e:
        log.error(f"Invalid scenario: {e}")
        return EXIT_CONFIG_ERROR
    except OSError as e:
        log.error(f"Could not read scenario: {e}")
        return EXIT_CONFIG_ERROR

    results = simulate_scenario(scenario)
    try:
        emit_report(results, scenario, scenario.output_dir)
    except OSError as e:
        log.error(f"Could not write results to {scenario.output_dir}: {e}")
        return EXIT_RUNTIME_ERROR

    if len(results.errors) > 0:
        log.error(f"{len(results.errors)} cells failed, see errors.csv")
        return EXIT_RUNTIME_ERROR
    return EXIT_OK
