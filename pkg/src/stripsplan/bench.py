"""Cross-solver benchmark: one phase report per (problem, planner) cell."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Iterable, TextIO

from .pddl import PddlError
from .pipeline import RunConfig, run_files
from .report import CSV_COLUMNS, PhaseReport, csv_row
from .suite import Instance


def run_cell(instance: Instance, config: RunConfig) -> PhaseReport:
    try:
        report = run_files(instance.domain, instance.problem, config).report
    except PddlError as exc:
        return PhaseReport(problem=instance.name, planner=config.planner, outcome="Error", note=str(exc))
    return replace(report, problem=instance.name)


def bench(
    instances: Iterable[Instance],
    planners: Iterable[str],
    base: RunConfig = RunConfig(),
    jobs: int = 1,
) -> list[PhaseReport]:
    """Run every cell, in parallel worker processes when ``jobs > 1``; rows keep input order."""
    cells = [(inst, replace(base, planner=planner)) for inst in instances for planner in planners]
    if jobs <= 1 or len(cells) <= 1:
        return [run_cell(inst, cfg) for inst, cfg in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_cell, inst, cfg) for inst, cfg in cells]
        return [f.result() for f in futures]


def write_csv(reports: Iterable[PhaseReport], out: TextIO) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(csv_row(report))


def to_csv(reports: Iterable[PhaseReport]) -> str:
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()
