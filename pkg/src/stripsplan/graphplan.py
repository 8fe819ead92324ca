"""GraphPlan: expand the full plan graph, then extract by backward search."""

from __future__ import annotations

import time

from .ground import GroundedProblem, bits
from .plan import LayeredPlan
from .plangraph import Node, PlanGraph
from .report import NO_DEADLINE, Deadline, Outcome, SearchTimeout, SolveResult


class Extractor:
    """Backward extraction over a graph, with nogood sets kept across stages.

    A nogood records a subgoal set already refuted at a proposition layer.
    The layers below a given one never change when the graph grows, so the
    sets stay valid for the whole run.
    """

    def __init__(self, graph: PlanGraph, deadline: Deadline = NO_DEADLINE, memo: bool = True):
        self.graph = graph
        self.deadline = deadline
        self.memo = memo
        self.nogoods: list[set[int]] = []
        self._producers: list[dict[int, list[int]]] = []
        self.calls = 0

    def _layer_producers(self, j: int) -> dict[int, list[int]]:
        while len(self._producers) <= j:
            al = self.graph.actions[len(self._producers)]
            table: dict[int, list[int]] = {}
            for pos, m in enumerate(al.add):
                for p in bits(m):
                    table.setdefault(p, []).append(pos)
            self._producers.append(table)
        return self._producers[j]

    def extract(self) -> LayeredPlan | None:
        g = self.graph
        while len(self.nogoods) <= len(g.props):
            self.nogoods.append(set())
        if not g.has_goals():
            return None
        layers = self._solve(len(g.actions), g.problem.goal_mask)
        if layers is None:
            return None
        return LayeredPlan(tuple(layers))

    def _solve(self, k: int, goals: int) -> list[frozenset[Node]] | None:
        if k == 0:
            return []
        if goals in self.nogoods[k]:
            return None
        self.calls += 1
        if self.calls & 0xFF == 0:
            self.deadline.check()
        layer = self.graph.actions[k - 1]
        producers = self._layer_producers(k - 1)
        order = sorted(bits(goals), reverse=True)
        chosen: list[int] = []

        def assign(i: int, covered: int, blocked: int) -> list[frozenset[Node]] | None:
            while i < len(order) and covered >> order[i] & 1:
                i += 1
            if i == len(order):
                pre = 0
                for pos in chosen:
                    pre |= layer.pre[pos]
                below = self._solve(k - 1, pre)
                if below is None:
                    return None
                return below + [frozenset(layer.nodes[pos] for pos in chosen)]
            for pos in producers[order[i]]:
                if blocked >> pos & 1:
                    continue
                chosen.append(pos)
                found = assign(i + 1, covered | layer.add[pos], blocked | layer.mutex[pos])
                if found is not None:
                    return found
                chosen.pop()
            return None

        result = assign(0, 0, 0)
        if result is None and self.memo:
            self.nogoods[k].add(goals)
        return result


def extract(g: PlanGraph) -> LayeredPlan | None:
    """One extraction attempt on ``g``; ``None`` means no plan at this depth."""
    return Extractor(g).extract()


def _level_off_layer(g: PlanGraph) -> int | None:
    for k in range(1, len(g.props)):
        a, b = g.props[k - 1], g.props[k]
        if a.mask == b.mask and a.partners == b.partners:
            return k - 1
    return None


def solve(
    p: GroundedProblem,
    max_layers: int = 64,
    deadline: Deadline = NO_DEADLINE,
    graph: PlanGraph | None = None,
) -> SolveResult:
    """Expand until the goals appear, then alternate extraction and expansion.

    Unsolvability is reported when the goals never co-occur in a leveled-off
    graph, or when the nogood count at the level-off layer stops changing
    between two consecutive failed stages beyond it.
    """
    g = graph if graph is not None else PlanGraph(p)
    result = SolveResult(Outcome.DEPTH_LIMIT)
    extractor = Extractor(g, deadline)
    search = 0.0
    previous_count: int | None = None
    try:
        while True:
            if g.has_goals():
                t0 = time.perf_counter()
                plan = extractor.extract()
                search += time.perf_counter() - t0
                if plan is not None:
                    result.outcome, result.plan = Outcome.PLAN, plan
                    break
                n = _level_off_layer(g)
                if n is not None and len(g.actions) > n:
                    count = len(extractor.nogoods[n])
                    if previous_count is not None and count == previous_count:
                        result.outcome = Outcome.UNSOLVABLE
                        result.note = "criterion=leveled-off+nogood-fixpoint"
                        break
                    previous_count = count
            elif g.leveled_off():
                result.outcome = Outcome.UNSOLVABLE
                result.note = "criterion=leveled-off"
                break
            if g.depth >= max_layers:
                result.outcome = Outcome.DEPTH_LIMIT
                break
            deadline.check()
            g.expand()
    except SearchTimeout:
        result.outcome = Outcome.TIMEOUT
    result.search_seconds = search
    result.expansion_seconds = list(g.expansion_times)
    result.mutex_seconds = sum(g.mutex_times)
    result.extra["graph"] = g
    return result
