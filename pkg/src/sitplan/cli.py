"""Command line: ``sitplan plan | validate | bench``.

Exit codes: 0 solved/valid, 1 unsolved within bound, 2 invalid plan,
3 usage or parse error, 4 timeout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .bench import SOLVED, TIMEOUT, UNSOLVED, InternalConsistencyError, RunOptions, bench, run
from .pddl import PDDLError, load_task
from .validate import PlanFormatError, read_plan, validate

EXIT_OK, EXIT_UNSOLVED, EXIT_INVALID, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sitplan", description="Lifted A* planner over situations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="solve one instance")
    p.add_argument("--domain", required=True, type=Path)
    p.add_argument("--problem", required=True, type=Path)
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--heuristic", choices=("rpg", "zero"), default="rpg")
    p.add_argument("--memo", action="store_true", help="memoize reachability within each evaluation")
    p.add_argument("--dedup", action="store_true", help="skip situations whose state was already expanded")
    p.add_argument("--timeout", type=float, default=1800.0, help="seconds")
    p.add_argument("--plan-out", type=Path)
    p.add_argument("--stats-out", type=Path)
    p.add_argument("--verbose", action="store_true")

    v = sub.add_parser("validate", help="check a plan file")
    v.add_argument("--domain", required=True, type=Path)
    v.add_argument("--problem", required=True, type=Path)
    v.add_argument("--plan", required=True, type=Path)

    b = sub.add_parser("bench", help="run a manifest of instances")
    b.add_argument("--manifest", required=True, type=Path)
    b.add_argument("--out", required=True, type=Path)
    b.add_argument("--jobs", type=int, default=1)
    return parser


def _report_progress(stats) -> None:
    logging.getLogger("sitplan").info(
        "visited=%d expanded=%d frontier<=%d %.1fs",
        stats.situations_visited, stats.expansions, stats.max_frontier, stats.wall_time,
    )


def _cmd_plan(args) -> int:
    if args.bound < 0:
        print("error: --bound must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    opts = RunOptions(args.bound, args.heuristic, args.memo, args.dedup, args.timeout)
    try:
        hook = _report_progress if args.verbose else None
        rec = run(args.domain, args.problem, opts, args.plan_out, progress_hook=hook)
    except InternalConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    doc = asdict(rec)
    if args.stats_out:
        args.stats_out.write_text(json.dumps(doc, indent=2) + "\n")
    if rec.outcome == SOLVED and not args.plan_out:
        for line in rec.plan:
            print(line)
    summary = {k: doc[k] for k in ("outcome", "plan_length", "situations_visited", "ratio_r", "time_total")}
    print("; " + json.dumps(summary), file=sys.stderr)
    return {SOLVED: EXIT_OK, UNSOLVED: EXIT_UNSOLVED, TIMEOUT: EXIT_TIMEOUT}[rec.outcome]


def _cmd_validate(args) -> int:
    task = load_task(args.domain, args.problem)
    try:
        actions = read_plan(args.plan, task)
    except PlanFormatError as exc:
        print(f"invalid plan file: {exc}", file=sys.stderr)
        return EXIT_INVALID
    verdict = validate(task, actions)
    print(verdict.reason)
    return EXIT_OK if verdict else EXIT_INVALID


def _cmd_bench(args) -> int:
    report = bench(args.manifest, args.out, jobs=args.jobs)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "plan":
            return _cmd_plan(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_bench(args)
    except (PDDLError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
