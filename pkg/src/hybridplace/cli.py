"""Command-line entry point: ``run`` one placer or ``compare`` all four.

Exit codes: 0 success, 1 runtime/internal failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .engine import InvariantViolation, run
from .metrics import compare, summarize
from .output import FORMATS, write_text, render_comparison, render_summary, render_trace
from .scenario import ConfigError, load_scenario

log = logging.getLogger("hybridplace")

PLACERS = ("dynamic", "flask", "docker", "serverless")
EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridplace",
        description="Simulate threshold-based placement of inference requests "
        "across a local server, a container pool and a serverless platform.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one placer")
    p_run.add_argument("--scenario", required=True, type=Path)
    p_run.add_argument("--placer", required=True, choices=PLACERS)
    p_run.add_argument("--seed", type=_u64, help="override the scenario seed")
    p_run.add_argument("--out", type=Path, help="summary file (stdout if omitted)")
    p_run.add_argument("--format", choices=FORMATS, default="csv")
    p_run.add_argument(
        "--trace",
        action="store_true",
        help="also write the per-request trace next to --out as <stem>.trace.<format>",
    )

    p_cmp = sub.add_parser("compare", help="run all four placers on one arrival stream")
    p_cmp.add_argument("--scenario", required=True, type=Path)
    p_cmp.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p_cmp.add_argument("--format", choices=FORMATS, default="csv")
    return parser


def trace_path(out: Path, fmt: str) -> Path:
    return out.with_name(f"{out.stem}.trace.{fmt}")


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.replace_seed(args.seed)
    result = run(scenario, args.placer)
    report = summarize(result.outcomes, result.decisions, result.placer_name)
    summary = render_summary([report], args.format)
    if args.out is None:
        sys.stdout.write(summary)
        if args.trace:
            sys.stdout.write("\n" + render_trace(result.outcomes, result.decisions, args.format))
        return EXIT_OK
    write_text(args.out, summary)
    if args.trace:
        write_text(trace_path(args.out, args.format), render_trace(result.outcomes, result.decisions, args.format))
    log.info("wrote %s", args.out)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    reports = []
    for placer in PLACERS:
        result = run(scenario, placer)
        reports.append(summarize(result.outcomes, result.decisions, result.placer_name))
    comparison = compare(reports)

    out: Path = args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror or exc}") from exc
    for report in reports:
        write_text(out / f"summary_{report.placer_name}.{args.format}", render_summary([report], args.format))
    table = render_comparison(comparison, args.format)
    write_text(out / f"comparison.{args.format}", table)
    sys.stdout.write(table)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    handler = cmd_run if args.command == "run" else cmd_compare
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
