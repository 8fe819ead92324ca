"""Forward state-space planning guided by the relaxed-plan heuristic.

The relaxed graph is computed as first-appearance levels of propositions and
actions from a state.  A relaxed plan is extracted backwards: each subgoal at
level ``i`` is achieved by an action of level ``i - 1`` with the fewest
preconditions (ties by index); the action's preconditions become subgoals at
their own levels.  A subgoal already added by a chosen action no later than
the earliest time it is needed is not achieved again, so shared achievers
are counted once and the relaxed plan stays executable.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from collections import deque
from dataclasses import dataclass

from .ground import GroundedProblem, bits
from .plan import LayeredPlan
from .report import NO_DEADLINE, Deadline, Outcome, SearchTimeout, SolveResult

INF = math.inf


class Unreachable(Exception):
    """The relaxed graph reaches a fixpoint without the goal."""


class EhcFailed(Exception):
    """Breadth-first search for a better state exhausted its space."""


@dataclass(frozen=True)
class RelaxedPlan:
    layers: tuple[tuple[int, ...], ...]  # O_0 .. O_{m-1}, action ids ascending
    first_subgoals: frozenset[int]  # G_1: subgoals achieved by O_0

    @property
    def length(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def as_layered(self) -> LayeredPlan:
        return LayeredPlan.from_actions(self.layers)


def relaxed_levels(state: frozenset[int], p: GroundedProblem) -> tuple[dict[int, int], dict[int, int]]:
    """First-appearance levels of propositions and actions in the relaxed graph from ``state``.

    Expansion stops once the goal is contained in the reached set or at the fixpoint.
    """
    prop_level = {q: 0 for q in state}
    reached = 0
    for q in state:
        reached |= 1 << q
    goal = p.goal_mask
    action_level: dict[int, int] = {}
    pending = [a for a in p.actions]
    level = 0
    while reached & goal != goal:
        new = 0
        rest = []
        for a in pending:
            if a.pre_mask & ~reached:
                rest.append(a)
            else:
                action_level[a.id] = level
                new |= a.add_mask
        new &= ~reached
        if not new:
            break
        level += 1
        for q in bits(new):
            prop_level[q] = level
        reached |= new
        pending = rest
    return prop_level, action_level


def relaxed_plan(state: frozenset[int], p: GroundedProblem) -> RelaxedPlan:
    prop_level, action_level = relaxed_levels(state, p)
    if any(g not in prop_level for g in p.goal):
        raise Unreachable(f"goal unreachable in the relaxation from a {len(state)}-fact state")
    m = max((prop_level[g] for g in p.goal), default=0)
    if m == 0:
        return RelaxedPlan((), frozenset())
    achievers: dict[int, list[int]] = {}
    for a, lvl in action_level.items():
        for q in p.actions[a].add:
            achievers.setdefault(q, []).append(a)
    goals_at: list[set[int]] = [set() for _ in range(m + 1)]
    # need[q]: earliest time q must hold; achieved[q]: earliest time a chosen action makes it hold
    need: dict[int, int] = {}
    achieved: dict[int, int] = {}
    for g in p.goal:
        goals_at[prop_level[g]].add(g)
        need[g] = m
    layers: list[set[int]] = [set() for _ in range(m)]
    for i in range(m, 0, -1):
        for g in sorted(goals_at[i]):
            if achieved.get(g, INF) <= need[g]:
                continue
            candidates = [a for a in achievers.get(g, ()) if action_level[a] == i - 1]
            a = min(candidates, key=lambda x: (len(p.actions[x].pre), x))
            layers[i - 1].add(a)
            for q in p.actions[a].pre:
                lvl = prop_level[q]
                if lvl > 0:
                    goals_at[lvl].add(q)
                    need[q] = min(need.get(q, INF), i - 1)
            for q in p.actions[a].add:
                achieved[q] = min(achieved.get(q, INF), i)
    return RelaxedPlan(tuple(tuple(sorted(layer)) for layer in layers), frozenset(goals_at[1]))


def h_ff(state: frozenset[int], p: GroundedProblem) -> float:
    try:
        return relaxed_plan(state, p).length
    except Unreachable:
        return INF


def helpful_actions(state: frozenset[int], p: GroundedProblem, rp: RelaxedPlan | None = None) -> list[int]:
    """Applicable actions adding at least one first-layer subgoal, ascending ids."""
    if rp is None:
        rp = relaxed_plan(state, p)
    g1 = 0
    for q in rp.first_subgoals:
        g1 |= 1 << q
    mask = 0
    for q in state:
        mask |= 1 << q
    return [a.id for a in p.actions if not a.pre_mask & ~mask and a.add_mask & g1]


def goal_deletion_prune(state: frozenset[int], p: GroundedProblem, rp: RelaxedPlan | None = None) -> bool:
    """True when some relaxed-plan action deletes a top-level goal in its real form."""
    if rp is None:
        rp = relaxed_plan(state, p)
    goal = p.goal_mask
    return any(p.actions[a].del_mask & goal for layer in rp.layers for a in layer)


def _successor(state: frozenset[int], p: GroundedProblem, a: int) -> frozenset[int]:
    action = p.actions[a]
    return (state - action.dele) | action.add


def _evaluate(state: frozenset[int], p: GroundedProblem) -> RelaxedPlan | None:
    try:
        return relaxed_plan(state, p)
    except Unreachable:
        return None


def enforced_hill_climb(
    p: GroundedProblem,
    deadline: Deadline = NO_DEADLINE,
    helpful: bool = True,
    prune: bool = True,
) -> list[int]:
    """Sequence of action ids from the initial state, or :class:`EhcFailed`."""
    state = p.init
    rp = _evaluate(state, p)
    if rp is None:
        raise EhcFailed("initial state has infinite heuristic")
    h = rp.length
    plan: list[int] = []
    while h > 0:
        # breadth-first search for a strictly better state
        queue: deque[tuple[frozenset[int], RelaxedPlan, list[int]]] = deque([(state, rp, [])])
        seen = {state}
        found = None
        while queue and found is None:
            deadline.check()
            s, s_rp, path = queue.popleft()
            moves = helpful_actions(s, p, s_rp) if helpful else [a.id for a in p.applicable(s)]
            for a in moves:
                t = _successor(s, p, a)
                if t in seen:
                    continue
                seen.add(t)
                t_rp = _evaluate(t, p)
                if t_rp is None:
                    continue
                if prune and goal_deletion_prune(t, p, t_rp):
                    continue
                if t_rp.length < h:
                    found = (t, t_rp, path + [a])
                    break
                queue.append((t, t_rp, path + [a]))
        if found is None:
            raise EhcFailed(f"no better state reachable from a state with h={h}")
        state, rp, path = found
        h = rp.length
        plan.extend(path)
    return plan


def best_first(p: GroundedProblem, deadline: Deadline = NO_DEADLINE) -> list[int] | None:
    """Greedy best-first on h_ff over all successors; ``None`` once the space is exhausted."""
    start = p.init
    h0 = h_ff(start, p)
    if h0 == INF:
        return None
    tie = itertools.count()
    frontier: list[tuple[float, int, frozenset[int]]] = [(h0, next(tie), start)]
    parent: dict[frozenset[int], tuple[frozenset[int], int] | None] = {start: None}
    closed: set[frozenset[int]] = set()
    while frontier:
        deadline.check()
        h, _, s = heapq.heappop(frontier)
        if s in closed:
            continue
        closed.add(s)
        if h == 0:
            plan: list[int] = []
            while parent[s] is not None:
                s, a = parent[s]
                plan.append(a)
            return plan[::-1]
        for action in p.applicable(s):
            t = _successor(s, p, action.id)
            if t in closed or t in parent:
                continue
            ht = h_ff(t, p)
            if ht == INF:
                closed.add(t)
                continue
            parent[t] = (s, action.id)
            heapq.heappush(frontier, (ht, next(tie), t))
    return None


def solve_ff(
    p: GroundedProblem,
    deadline: Deadline = NO_DEADLINE,
    helpful: bool = True,
    prune: bool = True,
) -> SolveResult:
    """Enforced hill-climbing, falling back to best-first search on failure."""
    result = SolveResult(Outcome.UNSOLVABLE)
    t0 = time.perf_counter()
    try:
        try:
            actions = enforced_hill_climb(p, deadline, helpful, prune)
            result.note = "search=ehc"
        except EhcFailed:
            actions = best_first(p, deadline)
            result.note = "search=best-first"
        if actions is None:
            result.note = "criterion=state-space-exhausted"
        else:
            result.outcome = Outcome.PLAN
            result.plan = LayeredPlan.sequential(actions)
    except SearchTimeout:
        result.outcome = Outcome.TIMEOUT
    result.search_seconds = time.perf_counter() - t0
    return result
