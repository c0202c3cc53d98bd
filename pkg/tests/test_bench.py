import json

import pytest

from sitplan import instances
from sitplan.bench import (
    ERROR, SOLVED, TIMEOUT, UNSOLVED, RunOptions, RunRecord, aggregate, bench, read_records_csv, run,
)
from sitplan.validate import read_plan, validate
from sitplan.pddl import load_task


def rec(dom, length, visited, outcome=SOLVED):
    return RunRecord(dom, f"p{length}-{visited}", outcome, plan_length=length, situations_visited=visited,
                     ratio_r=None if length is None else length / visited)


def test_aggregate_mean_and_fraction():
    report = aggregate([rec("d", 8, 10), rec("d", 7, 10)])
    s = report.domains["d"]
    assert s.mean_ratio == pytest.approx(0.75)
    assert s.fraction_r_ge_075 == 0.5
    assert (s.tested, s.kept) == (2, 2)


def test_aggregate_perfect_guidance():
    lengths = [1, 2, 3, 4]
    report = aggregate([rec("d", n, n + 1) for n in lengths])
    want = sum(n / (n + 1) for n in lengths) / len(lengths)
    assert report.domains["d"].mean_ratio == pytest.approx(want)


def test_aggregate_discards_zero_step_and_timeouts():
    recs = [rec("d", 0, 1), rec("d", None, 50, TIMEOUT), rec("d", 9, 10), rec("d", None, 3, ERROR)]
    s = aggregate(recs).domains["d"]
    assert (s.tested, s.kept) == (4, 1)
    assert s.mean_ratio == pytest.approx(0.9)
    assert 0 <= s.fraction_r_ge_075 <= 1


def test_run_sussman(tmp_path):
    out = tmp_path / "sussman.plan"
    r = run(instances.domain_file("blocksworld"), instances.problem_file("blocksworld", "sussman"),
            plan_out=out)
    assert r.outcome == SOLVED and r.plan_length == 3
    assert r.situations_visited == 4 and r.ratio_r == pytest.approx(0.75)
    assert r.time_per_step == pytest.approx(r.time_total / 3)
    assert r.time_total >= r.time_preprocess > 0
    task = load_task(instances.domain_file("blocksworld"), instances.problem_file("blocksworld", "sussman"))
    assert validate(task, read_plan(out, task))


def test_run_zero_step(tmp_path):
    dom = instances.domain_file("blocksworld")
    prob = tmp_path / "p.pddl"
    prob.write_text("(define (problem z) (:domain blocksworld) (:objects a) (:init (ontable a) (clear a)) (:goal (clear a)))")
    r = run(dom, prob)
    assert r.outcome == SOLVED and r.plan_length == 0 and r.situations_visited == 1


def test_run_bound_zero():
    r = run(instances.domain_file("blocksworld"), instances.problem_file("blocksworld", "sussman"),
            RunOptions(bound=0))
    assert r.outcome == UNSOLVED and r.ratio_r is None


def _manifest(tmp_path, runs, options=None):
    path = tmp_path / "suite.json"
    path.write_text(json.dumps({"options": options or {}, "runs": runs}))
    return path


def test_bench_outputs_are_self_consistent(tmp_path):
    data = instances.data_dir()
    runs = [{"domain": str(data / "blocksworld/domain.pddl"), "problem": str(data / f"blocksworld/{p}.pddl")}
            for p in ("sussman", "bw-3-1", "bw-3-2", "bw-4-3", "bw-5-1")]
    runs.append({"domain": str(data / "blocksworld/domain.pddl"), "problem": str(tmp_path / "missing.pddl")})
    report = bench(_manifest(tmp_path, runs), tmp_path / "out")
    out = tmp_path / "out"
    lines = [json.loads(x) for x in (out / "runs.jsonl").read_text().splitlines()]
    assert len(lines) == 6 and lines[-1]["outcome"] == ERROR
    recomputed = aggregate(read_records_csv(out / "runs.csv"))
    assert recomputed == report
    summary = json.loads((out / "summary.json").read_text())
    assert summary == report.to_dict()
    s = report.domains["blocksworld"]
    assert s.kept <= s.tested == 6
    # every emitted plan re-validates from disk
    for line in lines[:-1]:
        task = load_task(data / "blocksworld/domain.pddl", data / f"blocksworld/{line['problem_name']}.pddl")
        assert validate(task, read_plan(out / "plans" / f"blocksworld-{line['problem_name']}.plan", task))


def test_bench_parallel_matches_serial(tmp_path):
    data = instances.data_dir()
    runs = [{"domain": f"{d}/domain.pddl", "problem": f"{d}/{p}.pddl"}
            for d, p in (("corridor", "corridor-3"), ("gripper", "gripper-1-0"), ("logistics", "log-2"))]
    manifest = data / "suite.json"
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"runs": [{k: str(data / v) for k, v in r.items()} for r in runs]}))
    serial = bench(path, tmp_path / "a", jobs=1)
    parallel = bench(path, tmp_path / "b", jobs=2)
    assert serial == parallel
    assert manifest.exists()
