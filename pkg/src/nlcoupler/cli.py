"""Command-line sweep runner.

    sweep --config <path> [--oracle] [--out <csv>] [--plot <script>]
          [--report <path>] [--parallel <n>] [--fail-fast]

Exit codes: 0 success, 2 config error, 3 numeric guard error (fail-fast),
4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .coeffs import GuardBandError
from .focksim import CutoffTooTight, StepTooCoarse
from .sweep import (
    ConfigError,
    MissingEngine,
    SweepPointError,
    compare_report,
    emit_csv,
    emit_plotscript,
    parse_config,
    render_csv,
    run_sweep,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sweep",
        description="Sweep nonclassicality witnesses over the coupler interaction length.",
    )
    parser.add_argument("--config", required=True, help="path to the key=value sweep config")
    parser.add_argument("--oracle", action="store_true", help="also run the Fock-space oracle engine")
    parser.add_argument("--out", help="CSV output path (default: CSV to stdout)")
    parser.add_argument("--plot", help="write a plot script here")
    parser.add_argument("--report", help="write the analytic-vs-oracle comparison here")
    parser.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes (default 1)")
    parser.add_argument("--fail-fast", action="store_true", help="abort on the first failing grid point")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"sweep: cannot read config: {e}", file=sys.stderr)
        return 2

    try:
        config = parse_config(text)
        if args.oracle:
            config = replace(config, oracle=replace(config.oracle, enabled=True))
        out = args.out or config.out
        plot = args.plot or config.plot
        report = args.report or config.report
        if report and not config.oracle.enabled:
            raise ConfigError("--report needs the oracle engine (pass --oracle or set oracle=on)")
        if args.parallel < 1:
            raise ConfigError("--parallel must be >= 1")

        rows = run_sweep(config, parallel=args.parallel, fail_fast=args.fail_fast)
        if not rows:
            print("sweep: every grid point failed", file=sys.stderr)
            return 3
    except ConfigError as e:
        print(f"sweep: config error: {e}", file=sys.stderr)
        return 2
    except (SweepPointError, GuardBandError, CutoffTooTight, StepTooCoarse) as e:
        print(f"sweep: numeric guard: {e}", file=sys.stderr)
        return 3

    try:
        if out:
            emit_csv(rows, out)
        else:
            sys.stdout.write(render_csv(rows))
        if plot:
            emit_plotscript(rows, plot, csv_path=out or "sweep.csv")
        if report:
            try:
                text = compare_report(rows).to_text()
            except MissingEngine as e:
                print(f"sweep: config error: {e}", file=sys.stderr)
                return 2
            with open(report, "w", encoding="utf-8") as fh:
                fh.write(text)
    except OSError as e:
        print(f"sweep: I/O error: {e}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
