"""Command-line front end for the experiment runner.

Usage: ``pathwise-hj <scenario> [--config FILE] [--seed N] [--out DIR]
[--no-figures]``.  The scenario may come from the command line, the config
file, or both (they must agree).  Exit status: 0 when every assertion in the
run passed, 1 when at least one failed, 2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .experiments import (
    SCENARIOS,
    ConfigError,
    ExperimentConfig,
    default_config,
    execute,
    parse_config,
)
from .paths import RngSeed

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathwise-hj",
        description="Pathwise Hamilton-Jacobi experiment runner.",
    )
    parser.add_argument(
        "scenario",
        nargs="?",
        metavar="scenario",
        help="scenario to run (see --list-scenarios)",
    )
    parser.add_argument("--config", metavar="FILE", help="run configuration file")
    parser.add_argument(
        "--seed", type=int, metavar="N", help="override the root random seed"
    )
    parser.add_argument("--out", metavar="DIR", help="override the output directory")
    parser.add_argument(
        "--no-figures",
        action="store_true",
        help="skip figure rendering, emit tables and the summary only",
    )
    parser.add_argument(
        "--list-scenarios", action="store_true", help="list scenarios and exit"
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    return parser


def _list_scenarios() -> None:
    width = max(len(name) for name in SCENARIOS)
    for name in sorted(SCENARIOS):
        print(f"{name:<{width}}  {SCENARIOS[name].description}")


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        cfg = parse_config(text)
        if args.scenario is not None and args.scenario != cfg.scenario:
            raise ConfigError(
                f"command line asks for '{args.scenario}' but the config "
                f"file declares '{cfg.scenario}'"
            )
    elif args.scenario is not None:
        cfg = default_config(args.scenario)
    else:
        raise ConfigError("nothing to run: give a scenario or --config FILE")
    if args.seed is not None:
        try:
            seed = RngSeed(args.seed, 0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        cfg = dataclasses.replace(cfg, seed=seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_dir=Path(args.out))
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_scenarios:
        _list_scenarios()
        return 0
    try:
        cfg = _load_config(args)
        artifact = execute(cfg, render_figures=not args.no_figures)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    for row in artifact.assertions:
        status = "PASS" if row["passed"] else "FAIL"
        print(
            f"{status} {row['name']}: measured {row['measured']:.6g} "
            f"({row['mode']} {row['expected']:.6g}, "
            f"tolerance {row['tolerance']:.3g})"
        )
    print(f"wrote {cfg.output_dir}/summary.json")
    return 0 if artifact.passed else 1


if __name__ == "__main__":
    sys.exit(main())
