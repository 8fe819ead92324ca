"""Command-line interface: ``solve``, ``validate``, ``export``, ``bench``, ``decode``.

Exit codes: 0 plan found (or plan valid), 1 unsolvable (or plan invalid),
2 depth or time limit, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bench import bench, write_csv
from .ground import GroundedProblem, dump_ground
from .pddl import PddlError
from .petri import format_net, translate
from .pipeline import DEFAULT_MAX_LAYERS, DEFAULT_TIMEOUT, PLANNERS, RunConfig, load_grounded, run_problem
from .plan import PlanFormatError, format_plan, parse_plan
from .plangraph import PlanGraph, dump_graph
from .report import EXIT_CODES, format_table
from .satenc import decode_model, encode, parse_dimacs, parse_model, simplify, to_dimacs
from .suite import FIXTURE_DIR, discover
from .validate import validate

EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", required=True, help="PDDL domain file")
    p.add_argument("--problem", required=True, help="PDDL problem file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stripsplan", description="STRIPS planners over a shared plan graph.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve a problem and print the plan")
    _add_problem_args(s)
    s.add_argument("--planner", choices=PLANNERS, default="graphplan")
    s.add_argument("--max-layers", type=int, default=DEFAULT_MAX_LAYERS)
    s.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds; 0 disables")
    s.add_argument("--stats", choices=("table", "csv", "json"), help="print a phase report")
    s.add_argument("--simplify", action="store_true", help="eliminate propositions before SAT solving")
    s.add_argument("--dump-graph", action="store_true", help="print the final plan graph")
    s.add_argument("--dump-ground", action="store_true", help="print the grounded problem")
    s.add_argument("--ff-no-helpful", action="store_true", help="hill-climb over all successors")
    s.add_argument("--ff-no-prune", action="store_true", help="disable goal-deletion pruning")
    s.add_argument("--out", help="write the plan here instead of stdout")

    v = sub.add_parser("validate", help="check a plan file by simulation")
    _add_problem_args(v)
    v.add_argument("--plan", required=True, help="plan text file")

    e = sub.add_parser("export", help="write the graph, net, CNF or grounding of a problem")
    _add_problem_args(e)
    e.add_argument("--format", choices=("dimacs", "petri", "net", "graph", "ground"), default="dimacs")
    e.add_argument("--layers", type=int, help="action layers to build (default: until the goals appear)")
    e.add_argument("--max-layers", type=int, default=DEFAULT_MAX_LAYERS)
    e.add_argument("--simplify", action="store_true", help="eliminate propositions (dimacs only)")
    e.add_argument("--out", help="output file (default stdout)")

    b = sub.add_parser("bench", help="run planners over a suite and write CSV")
    b.add_argument("--suite", default=str(FIXTURE_DIR), help="directory of PDDL pairs (default: bundled)")
    b.add_argument("--planners", default=",".join(PLANNERS), help="comma-separated planner list")
    b.add_argument("--max-layers", type=int, default=DEFAULT_MAX_LAYERS)
    b.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    b.add_argument("--simplify", action="store_true")
    b.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    b.add_argument("--out", help="CSV file (default stdout)")

    d = sub.add_parser("decode", help="turn a SAT model of an exported CNF into a plan")
    _add_problem_args(d)
    d.add_argument("--cnf", required=True, help="DIMACS file written by export")
    d.add_argument("--model", required=True, help="model file (v-lines or signed integers)")
    d.add_argument("--out", help="write the plan here instead of stdout")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _timeout(value: float) -> float | None:
    return None if value <= 0 else value


def _cmd_solve(args: argparse.Namespace) -> int:
    p, parse_s, inst_s = load_grounded(args.domain, args.problem)
    config = RunConfig(
        planner=args.planner,
        max_layers=args.max_layers,
        timeout=_timeout(args.timeout),
        simplify=args.simplify,
        ff_helpful=not args.ff_no_helpful,
        ff_prune=not args.ff_no_prune,
    )
    run = run_problem(p, config, parse_s, inst_s)
    if args.dump_ground:
        sys.stdout.write(dump_ground(p) + "\n")
    if args.dump_graph:
        graph = run.result.extra.get("graph") or getattr(run.result.extra.get("builder"), "graph", None)
        if graph is None:
            graph = PlanGraph(p)
            while not graph.has_goals() and not graph.leveled_off() and graph.depth < args.max_layers:
                graph.expand()
        sys.stdout.write(dump_graph(graph) + "\n")
    result = run.result
    if result.plan is not None:
        _emit(format_plan(result.plan, p), args.out)
    else:
        note = f" ({result.note})" if result.note else ""
        sys.stdout.write(f"outcome={result.outcome.value}{note}\n")
    if args.stats == "table":
        sys.stdout.write(format_table(run.report))
    elif args.stats == "csv":
        write_csv([run.report], sys.stdout)
    elif args.stats == "json":
        sys.stdout.write(json.dumps(run.report.as_dict(), indent=2) + "\n")
    return EXIT_CODES[result.outcome]


def _cmd_validate(args: argparse.Namespace) -> int:
    p, _, _ = load_grounded(args.domain, args.problem)
    plan = parse_plan(Path(args.plan).read_text(encoding="utf-8"), p)
    verdict = validate(p, plan)
    print(verdict)
    return 0 if verdict.valid else 1


def _graph_for_export(p: GroundedProblem, layers: int | None, max_layers: int) -> PlanGraph:
    g = PlanGraph(p)
    if layers is not None:
        while g.depth < layers:
            g.expand()
        return g
    while not g.has_goals():
        if g.leveled_off() or g.depth >= max_layers:
            raise UsageError("goals never appear in the plan graph; pass --layers to export anyway")
        g.expand()
    return g


def _cmd_export(args: argparse.Namespace) -> int:
    p, _, _ = load_grounded(args.domain, args.problem)
    if args.format == "ground":
        _emit(dump_ground(p) + "\n", args.out)
        return 0
    g = _graph_for_export(p, args.layers, args.max_layers)
    if args.format == "graph":
        _emit(dump_graph(g) + "\n", args.out)
    elif args.format in ("petri", "net"):
        _emit(format_net(translate(g)), args.out)
    else:
        f = encode(g)
        if args.simplify:
            f = simplify(f)
        _emit(to_dimacs(f), args.out)
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    planners = [x.strip() for x in args.planners.split(",") if x.strip()]
    unknown = [x for x in planners if x not in PLANNERS]
    if unknown:
        raise UsageError(f"unknown planner(s): {', '.join(unknown)}")
    base = RunConfig(max_layers=args.max_layers, timeout=_timeout(args.timeout), simplify=args.simplify)
    reports = bench(discover(args.suite), planners, base, jobs=args.jobs)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(reports, fh)
    else:
        write_csv(reports, sys.stdout)
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    p, _, _ = load_grounded(args.domain, args.problem)
    f = parse_dimacs(Path(args.cnf).read_text(encoding="utf-8"), p)
    model = parse_model(Path(args.model).read_text(encoding="utf-8"))
    plan = decode_model(f, model)
    _emit(format_plan(plan, p), args.out)
    return 0


COMMANDS = {
    "solve": _cmd_solve,
    "validate": _cmd_validate,
    "export": _cmd_export,
    "bench": _cmd_bench,
    "decode": _cmd_decode,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (PddlError, PlanFormatError, UsageError, OSError, KeyError, ValueError) as exc:
        print(f"stripsplan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
