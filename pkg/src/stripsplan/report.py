"""Outcomes, solver results, deadlines and per-phase timing records."""

from __future__ import annotations

import enum
import time
from dataclasses import asdict, dataclass, field
from typing import Any

from .plan import LayeredPlan


class Outcome(str, enum.Enum):
    PLAN = "Plan"
    UNSOLVABLE = "Unsolvable"
    DEPTH_LIMIT = "DepthLimit"
    TIMEOUT = "Timeout"


EXIT_CODES = {Outcome.PLAN: 0, Outcome.UNSOLVABLE: 1, Outcome.DEPTH_LIMIT: 2, Outcome.TIMEOUT: 2}


class SearchTimeout(Exception):
    pass


class Deadline:
    """Wall-clock budget; ``check`` raises :class:`SearchTimeout` once expired."""

    def __init__(self, seconds: float | None):
        self.expires = None if seconds is None else time.perf_counter() + seconds

    def check(self) -> None:
        if self.expires is not None and time.perf_counter() > self.expires:
            raise SearchTimeout()

    @property
    def expired(self) -> bool:
        return self.expires is not None and time.perf_counter() > self.expires


NO_DEADLINE = Deadline(None)


@dataclass
class SolveResult:
    outcome: Outcome
    plan: LayeredPlan | None = None
    note: str = ""
    search_seconds: float = 0.0
    translation_seconds: float = 0.0
    expansion_seconds: list[float] = field(default_factory=list)
    mutex_seconds: float = 0.0
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class PhaseReport:
    problem: str
    planner: str
    outcome: str
    parse: float = 0.0
    instantiation: float = 0.0
    mutex: float = 0.0
    expansions: float = 0.0
    expansion_list: list[float] = field(default_factory=list)
    translation: float = 0.0
    search: float = 0.0
    total: float = 0.0
    graph_nodes: int | None = None
    graph_edges: int | None = None
    graph_mutexes: int | None = None
    net_rows: int | None = None
    net_columns: int | None = None
    net_nonzeros: int | None = None
    net_conflicts: int | None = None
    action_count: int | None = None
    step_count: int | None = None
    note: str = ""

    @property
    def residual(self) -> float:
        return self.total - (
            self.parse + self.instantiation + self.mutex + self.expansions + self.translation + self.search
        )

    def as_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["residual"] = self.residual
        return d


CSV_COLUMNS = [
    "problem",
    "planner",
    "outcome",
    "parse",
    "instantiation",
    "mutex",
    "expansions",
    "translation",
    "search",
    "total",
    "residual",
    "graph_nodes",
    "graph_edges",
    "graph_mutexes",
    "net_rows",
    "net_columns",
    "net_nonzeros",
    "net_conflicts",
    "action_count",
    "step_count",
    "expansion_list",
    "note",
]

TIMER_FIELDS = ("parse", "instantiation", "mutex", "expansions", "translation", "search", "total", "residual")


def csv_row(report: PhaseReport, failed_marker: str = "x") -> dict[str, str]:
    """Flatten a report for CSV; timers get 2 decimals, failures get ``x`` plan cells."""
    d = report.as_dict()
    row: dict[str, str] = {}
    failed = report.outcome != Outcome.PLAN.value
    for col in CSV_COLUMNS:
        value = d[col]
        if col in TIMER_FIELDS:
            row[col] = f"{value:.2f}"
        elif col == "expansion_list":
            row[col] = " ".join(f"{v:.2f}" for v in value)
        elif col in ("action_count", "step_count") and failed:
            row[col] = failed_marker
        elif value is None:
            row[col] = ""
        else:
            row[col] = str(value)
    return row


def format_table(report: PhaseReport) -> str:
    rows = [
        ("Outcome", report.outcome),
        ("Parse time", f"{report.parse:.2f}"),
        ("Instantiation time", f"{report.instantiation:.2f}"),
        ("Mutex time", f"{report.mutex:.2f}"),
        ("Expansion time", f"{report.expansions:.2f}"),
    ]
    for i, t in enumerate(report.expansion_list, 1):
        rows.append((f"  expansion {i}", f"{t:.2f}"))
    rows += [
        ("Translation time", f"{report.translation:.2f}"),
        ("Search time", f"{report.search:.2f}"),
        ("Total time", f"{report.total:.2f}"),
        ("Untimed residual", f"{report.residual:.2f}"),
    ]
    for label, key in (
        ("Graph nodes", "graph_nodes"),
        ("Graph edges", "graph_edges"),
        ("Graph mutexes", "graph_mutexes"),
        ("Net rows", "net_rows"),
        ("Net columns", "net_columns"),
        ("Net nonzeros", "net_nonzeros"),
        ("Net conflicts", "net_conflicts"),
        ("Actions", "action_count"),
        ("Steps", "step_count"),
    ):
        value = getattr(report, key)
        if value is not None:
            rows.append((label, str(value)))
    if report.note:
        rows.append(("Note", report.note))
    width = max(len(r[0]) for r in rows)
    return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows) + "\n"
