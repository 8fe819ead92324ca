from __future__ import annotations

import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from stripsplan.bench import bench, to_csv
from stripsplan.cli import main
from stripsplan.pipeline import PLANNERS, RunConfig, run_files
from stripsplan.report import CSV_COLUMNS
from stripsplan.suite import discover, find

from oracles import fixture_path


def args_for(name):
    inst = find(name)
    return ["--domain", str(inst.domain), "--problem", str(inst.problem)]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_gripper_exit_zero(capsys):
    code, out, _ = run(capsys, ["solve", *args_for("gripper-4")])
    assert code == 0
    assert out.splitlines()[-1] == "actions=11 steps=7"


def test_solve_unreachable_exit_one(capsys):
    code, out, _ = run(capsys, ["solve", *args_for("unreachable")])
    assert code == 1
    assert out.startswith("outcome=Unsolvable (criterion=leveled-off)")


def test_solve_depth_limit_exit_two(capsys):
    code, out, _ = run(capsys, ["solve", *args_for("gripper-4"), "--max-layers", "2"])
    assert code == 2
    assert "outcome=DepthLimit" in out


def test_usage_errors_exit_three(capsys, tmp_path):
    assert run(capsys, ["solve"])[0] == 3
    assert run(capsys, ["solve", *args_for("jantar"), "--planner", "nope"])[0] == 3
    missing = ["--domain", str(tmp_path / "none.pddl"), "--problem", str(tmp_path / "none.pddl")]
    assert run(capsys, ["solve", *missing])[0] == 3
    bad = tmp_path / "bad.pddl"
    bad.write_text("(define (domain d) (:predicates (p))", encoding="utf-8")
    code, _, err = run(capsys, ["solve", "--domain", str(bad), "--problem", str(bad)])
    assert code == 3 and "error" in err


@pytest.mark.parametrize("planner", PLANNERS)
def test_every_planner_solves_jantar(capsys, planner):
    code, out, _ = run(capsys, ["solve", *args_for("jantar"), "--planner", planner])
    assert code == 0
    assert out.splitlines()[:2] == ["0: (embrulhar)", "1: (cozinhar)"]


def test_stats_formats(capsys):
    code, out, _ = run(capsys, ["solve", *args_for("jantar"), "--stats", "json"])
    assert code == 0
    report = json.loads(out[out.index("{"):])
    assert report["action_count"] == 2 and report["outcome"] == "Plan"
    assert report["total"] >= report["parse"] + report["instantiation"]
    _, out, _ = run(capsys, ["solve", *args_for("jantar"), "--stats", "csv"])
    assert CSV_COLUMNS[0] in out.splitlines()[3]
    _, out, _ = run(capsys, ["solve", *args_for("jantar"), "--stats", "table"])
    assert "Total time" in out


def test_dump_flags(capsys):
    _, out, _ = run(capsys, ["solve", *args_for("jantar"), "--dump-graph", "--dump-ground"])
    assert "layer 0 props members=2 mutexes=0" in out
    assert "pre=[" in out


def test_out_file_and_validate(capsys, tmp_path):
    plan_file = tmp_path / "plan.txt"
    assert run(capsys, ["solve", *args_for("reduzido"), "--out", str(plan_file)])[0] == 0
    code, out, _ = run(capsys, ["validate", *args_for("reduzido"), "--plan", str(plan_file)])
    assert (code, out.strip()) == (0, "valid")
    lines = plan_file.read_text(encoding="utf-8").splitlines()
    lines[1], lines[2] = lines[2].replace("2:", "1:"), lines[1].replace("1:", "2:")
    plan_file.write_text("\n".join(lines) + "\n", encoding="utf-8")
    code, out, _ = run(capsys, ["validate", *args_for("reduzido"), "--plan", str(plan_file)])
    assert code == 1 and "PreconditionViolated" in out


@pytest.mark.parametrize("fmt", ["dimacs", "petri", "net", "graph", "ground"])
def test_export_formats(capsys, fmt):
    code, out, _ = run(capsys, ["export", *args_for("jantar"), "--format", fmt])
    assert code == 0 and out


def test_export_without_goals_needs_layers(capsys):
    assert run(capsys, ["export", *args_for("unreachable")])[0] == 3
    assert run(capsys, ["export", *args_for("unreachable"), "--layers", "2", "--format", "graph"])[0] == 0


def test_export_decode_round_trip(capsys, tmp_path):
    from stripsplan.satenc import parse_dimacs, solve_sat

    cnf = tmp_path / "f.cnf"
    assert run(capsys, ["export", *args_for("reduzido"), "--out", str(cnf)])[0] == 0
    p_args = args_for("reduzido")
    from stripsplan.pipeline import load_grounded

    p, _, _ = load_grounded(p_args[1], p_args[3])
    f = parse_dimacs(cnf.read_text(encoding="utf-8"), p)
    model = solve_sat(f)
    model_file = tmp_path / "model.txt"
    model_file.write_text("s SATISFIABLE\nv " + " ".join(str(v if b else -v) for v, b in sorted(model.items())) + " 0\n")
    plan_file = tmp_path / "plan.txt"
    code, _, _ = run(capsys, ["decode", *p_args, "--cnf", str(cnf), "--model", str(model_file), "--out", str(plan_file)])
    assert code == 0
    code, out, _ = run(capsys, ["validate", *p_args, "--plan", str(plan_file)])
    assert code == 0


def test_bench_empty_suite_is_header_only(capsys, tmp_path):
    code, out, _ = run(capsys, ["bench", "--suite", str(tmp_path)])
    assert code == 0
    assert out == ",".join(CSV_COLUMNS) + "\n"


def small_suite(tmp_path):
    for family, problem in (("blocks", "sussman"), ("gripper", "gripper-2"), ("logistics", "logistics-1")):
        d = tmp_path / family
        d.mkdir()
        shutil.copy(fixture_path(family, "domain.pddl"), d / "domain.pddl")
        shutil.copy(fixture_path(family, f"{problem}.pddl"), d / f"{problem}.pddl")
    return tmp_path


def test_bench_fifteen_rows(capsys, tmp_path):
    suite = small_suite(tmp_path)
    out_file = tmp_path / "bench.csv"
    code, _, _ = run(capsys, ["bench", "--suite", str(suite), "--jobs", "2", "--out", str(out_file)])
    assert code == 0
    rows = list(csv.DictReader(out_file.open(encoding="utf-8")))
    assert len(rows) == 15
    assert {r["planner"] for r in rows} == set(PLANNERS)
    assert all(r["outcome"] == "Plan" for r in rows)


def test_bench_graphplan_and_petriplan1_share_sizes():
    rows = bench(discover(fixture_path("blocks")), ["graphplan", "petriplan1"])
    by_problem = {}
    for r in rows:
        by_problem.setdefault(r.problem, {})[r.planner] = r
    for cells in by_problem.values():
        g, p = cells["graphplan"], cells["petriplan1"]
        assert (g.graph_nodes, g.graph_edges, g.graph_mutexes) == (p.graph_nodes, p.graph_edges, p.graph_mutexes)


def test_bench_failure_marker():
    rows = bench(discover(fixture_path("toy")), ["graphplan"])
    text = to_csv(rows)
    unreachable = [r for r in csv.DictReader(io.StringIO(text)) if r["problem"] == "unreachable"][0]
    assert unreachable["outcome"] == "Unsolvable" and unreachable["action_count"] == "x"


def test_phase_report_invariants():
    inst = find("gripper-2")
    for planner in PLANNERS:
        report = run_files(inst.domain, inst.problem, RunConfig(planner=planner)).report
        phases = report.parse + report.instantiation + report.mutex + report.expansions + report.translation + report.search
        assert report.total + 1e-9 >= phases
        assert abs(sum(report.expansion_list) - report.expansions) < 1e-9


def test_petri_reports_net_sizes():
    inst = find("jantar")
    report = run_files(inst.domain, inst.problem, RunConfig(planner="petriplan1")).report
    assert report.net_rows and report.net_columns and report.net_nonzeros is not None


def test_determinism_of_plans_and_sizes(capsys):
    a = run(capsys, ["solve", *args_for("logistics-1"), "--planner", "satplan", "--stats", "json"])[1]
    b = run(capsys, ["solve", *args_for("logistics-1"), "--planner", "satplan", "--stats", "json"])[1]
    strip = lambda text: {k: v for k, v in json.loads(text[text.index("{"):]).items() if k not in (
        "parse", "instantiation", "mutex", "expansions", "expansion_list", "translation", "search", "total", "residual")}
    assert a[: a.index("{")] == b[: b.index("{")]
    assert strip(a) == strip(b)


def test_console_entry_point():
    inst = find("jantar")
    proc = subprocess.run(
        [sys.executable, "-m", "stripsplan.cli", "solve", "--domain", str(inst.domain), "--problem", str(inst.problem)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "actions=2 steps=2"
