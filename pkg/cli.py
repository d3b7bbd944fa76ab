#!/usr/bin/env python3
"""
Command-line interface for the force-sensor noise bench.

    cqnc run config/example_sweep.yaml --format json
    cqnc run --preset fig2b --set squeezing.n_sq=20 --output results/
    cqnc compare a.csv b.csv --tolerance 1e-9
    cqnc validate --preset fig4
    cqnc presets list
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from src.bench.compare import compare
from src.bench.emit import OutputFormat, emit, load_result
from src.bench.loader import RunConfig, list_presets, load_config, load_preset
from src.bench.sweep import plan_curves, run_sweep
from src.config.settings import settings, setup_logging
from src.core.exceptions import ConfigurationError, NumericalError, SensorError
from src.core.json_utils import dumps_deterministic
from src.physics.model import validate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


def _load_run(args: argparse.Namespace) -> RunConfig:
    if args.preset:
        return load_preset(args.preset, args.set)
    if not args.config:
        raise ConfigurationError("give a sweep file or --preset NAME")
    return load_config(args.config, args.set)


def cmd_run(args: argparse.Namespace) -> int:
    run = _load_run(args)
    result = run_sweep(run, workers=args.workers)
    output_dir = settings.resolve_output_dir(Path(args.output) if args.output else None)
    path = emit(result, args.format, output_dir / f"{run.spec.name}.{args.format}")

    flagged = sum(len(curve.flagged) for curve in result.curves.values())
    print(f"{path} ({len(result.axis)} points, {len(result.curves)} curve(s), {flagged} flagged)")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """Validate the configuration, engine compatibility and the regime checks of every curve."""
    run = _load_run(args)
    failed = False
    for plan in plan_curves(run):
        params, squeezing, _ = plan.point(run.spec.axis.kind, None)
        report = validate(params, squeezing)
        print(f"[{plan.curve.label}] engine={plan.engine.capabilities.name}")
        for check in report.checks:
            status = "ok" if check.passed else ("advisory" if check.advisory else "FAIL")
            print(f"  {check.name:<20} {check.ratio:>12.4g} (threshold {check.threshold:g})  {status}")
        failed = failed or not report.all_passed
    print("configuration is valid" if not failed else "validity checks failed")
    return EXIT_INVALID if failed else EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    report = compare(
        load_result(args.result_a),
        load_result(args.result_b),
        args.tolerance,
        columns=args.columns,
    )
    if args.json:
        sys.stdout.write(dumps_deterministic(report.to_dict()))
    else:
        print(report.summary())
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_presets(args: argparse.Namespace) -> int:
    presets = list_presets()
    if args.json:
        print(json.dumps([{"name": n, "description": d} for n, d in presets], indent=2))
    else:
        for name, description in presets:
            print(f"{name:<8} {description}")
    return EXIT_OK


def _add_source_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", nargs="?", help="Sweep file (YAML)")
    parser.add_argument("--preset", help="Figure preset name instead of a sweep file")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="PATH=VALUE",
        help="Override a configuration scalar by dotted path (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqnc", description="Force-sensor noise spectra bench")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run a sweep file or preset")
    _add_source_arguments(run_parser)
    run_parser.add_argument("--format", choices=[f.value for f in OutputFormat], default="csv")
    run_parser.add_argument("--output", help="Output directory (default: $CQNC_OUTPUT_DIR or cwd)")
    run_parser.add_argument("--workers", type=int, default=1, help="Thread-pool size")
    run_parser.set_defaults(handler=cmd_run)

    validate_parser = subparsers.add_parser("validate", help="Validate a sweep file or preset")
    _add_source_arguments(validate_parser)
    validate_parser.set_defaults(handler=cmd_validate)

    compare_parser = subparsers.add_parser("compare", help="Compare two result files")
    compare_parser.add_argument("result_a")
    compare_parser.add_argument("result_b")
    compare_parser.add_argument("--tolerance", type=float, default=1e-9)
    compare_parser.add_argument("--columns", nargs="+", help="Restrict to these data columns")
    compare_parser.add_argument("--json", action="store_true", help="Print the report as JSON")
    compare_parser.set_defaults(handler=cmd_compare)

    presets_parser = subparsers.add_parser("presets", help="Figure presets")
    presets_sub = presets_parser.add_subparsers(dest="presets_command", required=True)
    list_parser = presets_sub.add_parser("list", help="List the available presets")
    list_parser.add_argument("--json", action="store_true")
    list_parser.set_defaults(handler=cmd_presets)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    setup_logging("DEBUG" if args.verbose else "WARNING")

    try:
        return args.handler(args)
    except NumericalError as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SensorError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
