#!/usr/bin/env python

import argparse
import logging
import sys
from pathlib import Path

from ..constants import GuidanceMode, PathShape
from ..data import PRESETS, load_preset
from ..main import EXIT_CONFIG_ERROR, run_scenario
from ..scenario import ScenarioValidationError

###############################################################################

log = logging.getLogger(__name__)

###############################################################################


def _csv_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def get_cli_arguments(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="walker-guidance",
        description="Simulate walker guidance trials and report their metrics",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run a scenario and write its results")
    run.add_argument(
        "config",
        type=str,
        help=f"Scenario JSON file, or one of the presets: {', '.join(sorted(PRESETS))}",
    )
    run.add_argument("--out", type=Path, default=None, help="Output directory")
    run.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
    run.add_argument(
        "--modes",
        type=_csv_list,
        default=None,
        help=f"Comma separated subset of modes ({','.join(m.value for m in GuidanceMode)})",
    )
    run.add_argument(
        "--paths",
        type=_csv_list,
        default=None,
        help=f"Comma separated subset of path shapes ({','.join(s.value for s in PathShape)})",
    )
    run.add_argument("--trials", type=int, default=None, help="Trials per (mode, path) cell")
    verbosity = run.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Only log errors")
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    args = get_cli_arguments(argv)

    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    logging.basicConfig(
        level=level,
        format="[%(levelname)4s: %(module)s:%(lineno)4s %(asctime)s] %(message)s",
    )

    overrides = {
        "out_dir": args.out,
        "seed": args.seed,
        "modes": args.modes,
        "shapes": args.paths,
        "trials": args.trials,
    }
    if args.config in PRESETS and not Path(args.config).exists():
        try:
            scenario = load_preset(args.config)
        except ScenarioValidationError as e:
            log.error(f"Invalid preset {args.config}: {e}")
            return EXIT_CONFIG_ERROR
        return run_scenario(scenario=scenario, **overrides)

    return run_scenario(config_path=args.config, **overrides)


if __name__ == "__main__":
    sys.exit(main())
