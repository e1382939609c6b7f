"""Command-line front end.

Three subcommands share one config format (see :mod:`dynguard.config`):

    dynguard analytic --config FILE [--out FILE]            analytic curves only
    dynguard simulate --config FILE [--out FILE] [--seed N] force simulation on
    dynguard sweep    --config FILE [--out FILE] [--seed N] run the config as written

``--out`` overrides the config's output path; ``--seed`` replaces the
config's seed list with a single seed. Exit codes: 0 success, 1 config or
validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, load_config
from .sweep import emit_csv, run_sweep


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynguard",
        description="Analytic and simulated blocking/utilization sweeps "
        "for dynamic guard-channel reservation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, summary in (
        ("analytic", "evaluate the analytic models only (simulation off)"),
        ("simulate", "run with simulation enabled regardless of the config"),
        ("sweep", "run the sweep exactly as configured"),
    ):
        cmd = sub.add_parser(name, help=summary)
        cmd.add_argument("--config", required=True, help="path to the sweep config file")
        cmd.add_argument("--out", help="output CSV path (overrides the config's 'out')")
        cmd.add_argument("--seed", type=int, help="replace the config's seed list with one seed")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "analytic":
            config = replace(config, sim_enabled=False)
        elif args.command == "simulate":
            config = replace(config, sim_enabled=True)
        if args.seed is not None:
            config = replace(config, sim_seeds=(args.seed,))
        out = args.out or config.out_path
        if out is None:
            raise ConfigError("no output path: set 'out' in the config or pass --out")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        rows = run_sweep(config)
        emit_csv(rows, out)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows)} rows to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
