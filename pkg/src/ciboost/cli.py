"""Command-line entry points.

    ciboost run <experiment-name | scenario-file> [--out DIR] [--dt S]
                [--duration S] [--decimation N]
    ciboost design [--table2 | --table3]
    ciboost validate <scenario-file>

``run`` executes either a named experiment or a scenario file and writes
waveform CSVs plus a plain-text report.  The exit code is 0 only if every
check of the run passed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import EXPERIMENTS, run_experiment
from .measurements import AnalysisReport
from .params import table2_defaults, table3_defaults
from .scenarios import ScenarioError, load_scenario, run_scenario
from .smallsignal import TABLE2_REFERENCE, design_report
from .waveforms import emit_csv, emit_period_stats_csv


def _cmd_run(args) -> int:
    overrides = {"dt": args.dt, "duration": args.duration,
                 "decimation": args.decimation}
    if args.target in EXPERIMENTS:
        result = run_experiment(args.target, out_dir=args.out, **overrides)
        print(result.report.render())
        for path in result.artifacts:
            print(f"artifact: {path}")
        return 0 if result.passed else 1

    path = Path(args.target)
    if not path.exists():
        print(f"error: {args.target!r} is neither a known experiment "
              f"({', '.join(sorted(EXPERIMENTS))}) nor a scenario file",
              file=sys.stderr)
        return 2
    config = load_scenario(path)
    if args.duration is not None or args.dt is not None or args.decimation is not None:
        import dataclasses
        changes = {}
        if args.duration is not None:
            changes["duration"] = args.duration
        if args.dt is not None:
            changes["steps_per_period"] = int(round(config.params.t_period / args.dt))
        if args.decimation is not None:
            changes["decimation"] = args.decimation
        config = dataclasses.replace(config, **changes)
    wf, report = run_scenario(config)
    out = Path(args.out) / config.name
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(wf, out / "waveform.csv")
    emit_period_stats_csv(wf, out / "waveform_periods.csv")
    (out / "report.txt").write_text(report.render())
    print(report.render())
    print(f"artifacts in {out}")
    return 0 if report.passed else 1


def _cmd_design(args) -> int:
    if args.table3:
        params, _, op = table3_defaults()
        print(design_report(params, op), end="")
    else:
        params, _, op = table2_defaults()
        print(design_report(params, op, reference=TABLE2_REFERENCE), end="")
    return 0


def _cmd_validate(args) -> int:
    try:
        config = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    print(f"ok: scenario {config.name!r} "
          f"(duration {config.duration} s, {config.steps_per_period} steps/period)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ciboost",
        description="Simulation and control-design toolkit for the "
                    "coupled-inductor multi-port boost converter",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a named experiment or scenario file")
    p_run.add_argument("target", help="experiment name or scenario path")
    p_run.add_argument("--out", default="results", help="output directory")
    p_run.add_argument("--dt", type=float, default=None,
                       help="integration step [s] (snapped to the period grid)")
    p_run.add_argument("--duration", type=float, default=None,
                       help="override run duration [s]")
    p_run.add_argument("--decimation", type=int, default=None,
                       help="sample decimation (must divide steps per period)")
    p_run.set_defaults(func=_cmd_run)

    p_design = sub.add_parser("design", help="print the controller design report")
    group = p_design.add_mutually_exclusive_group()
    group.add_argument("--table2", action="store_true",
                       help="simulation parameter set (default)")
    group.add_argument("--table3", action="store_true",
                       help="hardware prototype parameter set")
    p_design.set_defaults(func=_cmd_design)

    p_val = sub.add_parser("validate", help="check a scenario file without running")
    p_val.add_argument("scenario")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
