"""Single runs and benchmark suites with the situation-count metrics.

A run's ratio ``r`` is plan length over situations visited. Suite
aggregates follow the usual convention: runs that time out or whose
initial state already satisfies the goal are tested but not kept.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional

from .heuristic import make_heuristic
from .pddl import load_task
from .search import Limits, NoPlanWithinBound, Plan, ResourceLimit, plan
from .validate import validate, write_plan

log = logging.getLogger(__name__)

SOLVED = "solved"
UNSOLVED = "unsolved-within-bound"
TIMEOUT = "timeout"
ERROR = "error"

R_THRESHOLD = 0.75


class InternalConsistencyError(RuntimeError):
    """The search returned a plan the validator rejects."""


@dataclass(frozen=True)
class RunOptions:
    bound: int = 100
    heuristic: str = "rpg"
    memo: bool = False
    dedup: bool = False
    timeout: float = 1800.0
    max_frontier: Optional[int] = None
    cache_states: bool = False


@dataclass
class RunRecord:
    domain_name: str
    problem_name: str
    outcome: str
    plan_length: Optional[int] = None
    situations_visited: int = 0
    expansions: int = 0
    time_total: float = 0.0  # ms, preprocessing included
    time_preprocess: float = 0.0  # ms
    time_per_step: float = 0.0  # ms per action
    ratio_r: Optional[float] = None
    heuristic_mode: str = "rpg"
    dedup: bool = False
    memo: bool = False
    bound: int = 100
    error: str = ""
    plan: list = field(default_factory=list, repr=False)


def ratio(plan_length: int, visited: int) -> float:
    return plan_length / visited


def run(domain_path, problem_path, options: RunOptions = RunOptions(), plan_out=None,
        progress_hook=None) -> RunRecord:
    """Parse, compile, search and validate one instance."""
    t0 = time.perf_counter()
    task = load_task(Path(domain_path), Path(problem_path), options.bound)
    t_pre = time.perf_counter()
    outcome = plan(
        task,
        make_heuristic(options.heuristic, options.memo),
        Limits(timeout=options.timeout, max_frontier=options.max_frontier),
        dedup=options.dedup,
        cache_states=options.cache_states,
        progress_hook=progress_hook,
    )
    t_end = time.perf_counter()
    stats = outcome.stats
    rec = RunRecord(
        task.domain_name, task.name, UNSOLVED,
        situations_visited=stats.situations_visited, expansions=stats.expansions,
        time_total=(t_end - t0) * 1000.0, time_preprocess=(t_pre - t0) * 1000.0,
        heuristic_mode=options.heuristic, dedup=options.dedup, memo=options.memo, bound=options.bound,
    )
    if isinstance(outcome, Plan):
        actions = outcome.actions
        verdict = validate(task, actions)
        if not verdict:
            raise InternalConsistencyError(f"{task.name}: search returned an invalid plan ({verdict})")
        if plan_out is not None:
            write_plan(plan_out, task, actions)
        rec.outcome = SOLVED
        rec.plan_length = len(actions)
        rec.ratio_r = ratio(len(actions), stats.situations_visited)
        rec.plan = [task.format_action(a) for a in actions]
    elif isinstance(outcome, ResourceLimit):
        rec.outcome = TIMEOUT
        rec.error = outcome.reason
    else:
        assert isinstance(outcome, NoPlanWithinBound)
    rec.time_per_step = rec.time_total / max(rec.plan_length or 0, 1)
    return rec


@dataclass
class DomainSummary:
    tested: int = 0
    kept: int = 0
    mean_ratio: Optional[float] = None
    fraction_r_ge_075: Optional[float] = None


@dataclass
class SuiteReport:
    domains: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"domains": {k: asdict(v) for k, v in self.domains.items()}}


def is_kept(rec) -> bool:
    return rec.outcome == SOLVED and (rec.plan_length or 0) > 0


def aggregate(records: Iterable[RunRecord]) -> SuiteReport:
    """Per-domain mean ``r`` and fraction with ``r >= 0.75`` over kept runs."""
    groups: dict = {}
    for rec in records:
        groups.setdefault(rec.domain_name, []).append(rec)
    report = SuiteReport()
    for dom in sorted(groups):
        recs = groups[dom]
        kept = [r.ratio_r for r in recs if is_kept(r)]
        summary = DomainSummary(tested=len(recs), kept=len(kept))
        if kept:
            summary.mean_ratio = sum(kept) / len(kept)
            summary.fraction_r_ge_075 = sum(1 for r in kept if r >= R_THRESHOLD) / len(kept)
        report.domains[dom] = summary
    return report


# -- suites -----------------------------------------------------------------

CSV_FIELDS = [f.name for f in fields(RunRecord) if f.name != "plan"]


def load_manifest(path) -> tuple:
    """Return ``(options, [(domain, problem), ...])`` from a JSON manifest.

    Relative paths are resolved against the manifest's directory.
    """
    path = Path(path)
    doc = json.loads(path.read_text())
    opts = RunOptions(**doc.get("options", {}))
    base = path.parent
    runs = []
    for item in doc["runs"]:
        runs.append((base / item["domain"], base / item["problem"]))
    return opts, runs


def _safe_run(args) -> RunRecord:
    domain, problem, options, plan_out = args
    try:
        return run(domain, problem, options, plan_out)
    except Exception as exc:  # recorded, never aborts the suite
        log.error("%s: %s", problem, exc)
        return RunRecord(Path(domain).parent.name, Path(problem).stem, ERROR, error=f"{type(exc).__name__}: {exc}",
                         heuristic_mode=options.heuristic, dedup=options.dedup, memo=options.memo,
                         bound=options.bound)


def read_records_csv(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(RunRecord(
                row["domain_name"], row["problem_name"], row["outcome"],
                plan_length=int(row["plan_length"]) if row["plan_length"] else None,
                situations_visited=int(row["situations_visited"]),
                ratio_r=float(row["ratio_r"]) if row["ratio_r"] else None,
            ))
    return out


def bench(manifest, out_dir, jobs: int = 1, options: Optional[RunOptions] = None) -> SuiteReport:
    """Run every manifest entry and write runs.jsonl, runs.csv, summary.json and plans."""
    file_opts, runs = load_manifest(manifest)
    options = options or file_opts
    out = Path(out_dir)
    (out / "plans").mkdir(parents=True, exist_ok=True)
    jobs_args = [
        (d, p, options, out / "plans" / f"{Path(d).parent.name}-{Path(p).stem}.plan") for d, p in runs
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_safe_run, jobs_args))
    else:
        records = [_safe_run(a) for a in jobs_args]
    with open(out / "runs.jsonl", "w") as fh:
        for rec in records:
            fh.write(json.dumps(asdict(rec)) + "\n")
    with open(out / "runs.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for rec in records:
            row = {k: v for k, v in asdict(rec).items() if k in CSV_FIELDS}
            writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    report = aggregate(records)
    (out / "summary.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return report
