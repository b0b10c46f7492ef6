"""Command line entry point: ``verify``, ``demo`` and ``list-demos``."""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError, SectorialError
from .config import dump_config, load_config
from .demos import DEMOS, builtin_demo
from .report import emit_report, report_json
from .runner import run_scenario

EXIT_CONFIG = 2


def _summary(report) -> str:
    lines = [f"scenario {report.scenario} (seed {report.seed})"]
    for c in report.checks:
        line = f"  {c.name:<15} {c.status.upper():<5}"
        if c.reason:
            line += f"  {c.reason}"
        lines.append(line)
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines)


def _execute(scenario, args) -> int:
    if args.seed is not None:
        scenario.seed = args.seed
    if args.tol_scale is not None:
        scenario = scenario.with_tol_scale(args.tol_scale)
    report = run_scenario(scenario)
    if args.out:
        emit_report(report, args.out, args.format, timing=not args.no_timing)
        print(_summary(report), file=sys.stderr)
    else:
        sys.stdout.write(report_json(report, timing=not args.no_timing))
    return report.exit_code


def _add_run_options(p):
    p.add_argument("--out", help="output directory (default: JSON report on stdout)")
    p.add_argument("--format", choices=["json", "csv", "both"], default="json")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--tol-scale", type=float, default=None, help="multiply every tolerance by X")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sectorial", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("verify", help="run the checks of a scenario file")
    p.add_argument("config")
    _add_run_options(p)
    p = sub.add_parser("demo", help="run or emit a built-in scenario")
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--emit-config", metavar="PATH", help="write the scenario JSON instead of running it")
    _add_run_options(p)
    sub.add_parser("list-demos", help="list built-in scenarios")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-demos":
            for name in sorted(DEMOS):
                print(f"{name:<18} {builtin_demo(name).description}")
            return 0
        if args.command == "demo":
            scenario = builtin_demo(args.name)
            if args.emit_config:
                dump_config(scenario, args.emit_config)
                return 0
            return _execute(scenario, args)
        return _execute(load_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SectorialError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
