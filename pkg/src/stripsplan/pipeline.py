"""Instrumented planner runs: parse, ground, solve, and collect a phase report."""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from . import ffsearch, graphplan, petri, satenc
from .ground import GroundedProblem, ground
from .pddl import load_domain, load_problem
from .report import Deadline, Outcome, PhaseReport, SolveResult

PLANNERS = ("graphplan", "petriplan1", "petriplan2", "ff", "satplan")
DEFAULT_TIMEOUT = 60.0
DEFAULT_MAX_LAYERS = 64


@dataclass(frozen=True)
class RunConfig:
    planner: str = "graphplan"
    max_layers: int = DEFAULT_MAX_LAYERS
    timeout: float | None = DEFAULT_TIMEOUT
    simplify: bool = False
    ff_helpful: bool = True
    ff_prune: bool = True

    def __post_init__(self) -> None:
        if self.planner not in PLANNERS:
            raise ValueError(f"unknown planner {self.planner!r}; choose from {', '.join(PLANNERS)}")


@dataclass
class RunOutput:
    report: PhaseReport
    result: SolveResult
    problem: GroundedProblem


def solve_grounded(p: GroundedProblem, config: RunConfig, deadline: Deadline) -> SolveResult:
    if config.planner == "graphplan":
        return graphplan.solve(p, config.max_layers, deadline)
    if config.planner == "petriplan1":
        return petri.solve_petriplan1(p, config.max_layers, deadline)
    if config.planner == "petriplan2":
        return petri.solve_petriplan2(p, config.max_layers, deadline)
    if config.planner == "satplan":
        return satenc.solve_satplan(p, config.max_layers, deadline, use_simplify=config.simplify)
    return ffsearch.solve_ff(p, deadline, helpful=config.ff_helpful, prune=config.ff_prune)


def run_problem(
    p: GroundedProblem,
    config: RunConfig,
    parse_seconds: float = 0.0,
    instantiation_seconds: float = 0.0,
    started: float | None = None,
) -> RunOutput:
    if started is None:
        started = time.perf_counter() - parse_seconds - instantiation_seconds
    start = started
    deadline = Deadline(config.timeout)
    result = solve_grounded(p, config, deadline)
    report = PhaseReport(problem=p.name, planner=config.planner, outcome=result.outcome.value)
    report.parse = parse_seconds
    report.instantiation = instantiation_seconds
    report.mutex = result.mutex_seconds
    report.expansion_list = list(result.expansion_seconds)
    report.expansions = sum(report.expansion_list)
    report.translation = result.translation_seconds
    report.search = result.search_seconds
    report.note = result.note
    graph = result.extra.get("graph")
    builder = result.extra.get("builder")
    if graph is None and builder is not None:
        graph = builder.graph
    if graph is not None:
        report.graph_nodes, report.graph_edges, report.graph_mutexes = graph.counts()
    net = result.extra.get("net")
    if net is not None:
        stats = net.stats()
        report.net_rows = stats["rows"]
        report.net_columns = stats["columns"]
        report.net_nonzeros = stats["nonzeros"]
        report.net_conflicts = stats["conflicts"]
    if result.outcome == Outcome.PLAN and result.plan is not None:
        report.action_count = result.plan.action_count
        report.step_count = result.plan.step_count
    report.total = time.perf_counter() - start
    return RunOutput(report, result, p)


def load_grounded(domain_path: str | Path, problem_path: str | Path) -> tuple[GroundedProblem, float, float]:
    """Parse and ground; returns the problem with parse and instantiation seconds."""
    t0 = time.perf_counter()
    domain = load_domain(domain_path)
    problem = load_problem(problem_path)
    t1 = time.perf_counter()
    grounded = ground(domain, problem)
    t2 = time.perf_counter()
    return grounded, t1 - t0, t2 - t1


def run_files(domain_path: str | Path, problem_path: str | Path, config: RunConfig) -> RunOutput:
    start = time.perf_counter()
    p, parse_seconds, inst_seconds = load_grounded(domain_path, problem_path)
    return run_problem(p, config, parse_seconds, inst_seconds, started=start)
