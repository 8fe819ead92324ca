"""Plan-graph to CNF compilation, proposition elimination, and model decoding.

Variables are indexed by graph layer (propositions at even layers starting
at 0, actions and noops at odd layers).  Four clause families are emitted:

1. unit clauses for the initial state at layer 0 and the goals at the top;
2. each proposition above layer 0 implies the disjunction of its producers;
3. each action implies each of its preconditions;
4. each mutex pair of actions (noops included) excludes one another.
"""

from __future__ import annotations

import itertools
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .dpll import solve_cnf
from .ground import GroundedProblem, bits
from .plan import LayeredPlan
from .plangraph import Node, PlanGraph
from .report import NO_DEADLINE, Deadline, Outcome, SearchTimeout, SolveResult

PROP, ACTION, NOOP = "prop", "action", "noop"


class GoalAbsent(ValueError):
    pass


class VarInfo(NamedTuple):
    kind: str
    index: int  # proposition index for props and noops, action index for actions
    layer: int


@dataclass
class CnfFormula:
    problem: GroundedProblem
    var_map: dict[int, VarInfo]
    clauses: list[tuple[int, ...]]
    depth: int
    family_counts: dict[str, int] = field(default_factory=dict)

    @property
    def num_vars(self) -> int:
        return max(self.var_map, default=0)

    def var_name(self, v: int) -> str:
        info = self.var_map[v]
        if info.kind == ACTION:
            return self.problem.action_name(info.index)
        return self.problem.prop_name(info.index)

    def action_vars(self) -> list[int]:
        return [v for v, info in self.var_map.items() if info.kind != PROP]

    def live_vars(self) -> set[int]:
        return {abs(lit) for c in self.clauses for lit in c}


def encode(g: PlanGraph) -> CnfFormula:
    if g.relaxed:
        raise ValueError("relaxed graphs carry no conflicts to encode")
    p = g.problem
    top = len(g.props) - 1
    missing = p.goal - g.props[top].props
    if missing:
        raise GoalAbsent(f"goals {sorted(missing)} absent from the last layer")

    var_map: dict[int, VarInfo] = {}
    prop_var: dict[tuple[int, int], int] = {}
    node_var: dict[tuple[Node, int], int] = {}
    for k, layer in enumerate(g.props):
        for q in sorted(layer.props):
            v = len(var_map) + 1
            var_map[v] = VarInfo(PROP, q, 2 * k)
            prop_var[(q, k)] = v
        if k < len(g.actions):
            for node in g.actions[k].nodes:
                v = len(var_map) + 1
                var_map[v] = VarInfo(NOOP if node.noop else ACTION, node.index, 2 * k + 1)
                node_var[(node, k)] = v

    clauses: list[tuple[int, ...]] = []
    counts = {"init": 0, "goal": 0, "rule2": 0, "rule3": 0, "rule4": 0}
    for q in sorted(g.props[0].props):
        clauses.append((prop_var[(q, 0)],))
        counts["init"] += 1
    for q in sorted(p.goal):
        clauses.append((prop_var[(q, top)],))
        counts["goal"] += 1
    for j, layer in enumerate(g.actions):
        producers: dict[int, list[int]] = {}
        for pos, node in enumerate(layer.nodes):
            for q in bits(layer.add[pos]):
                producers.setdefault(q, []).append(node_var[(node, j)])
        for q in sorted(g.props[j + 1].props):
            clauses.append((-prop_var[(q, j + 1)], *producers[q]))
            counts["rule2"] += 1
        for pos, node in enumerate(layer.nodes):
            a = node_var[(node, j)]
            for q in bits(layer.pre[pos]):
                clauses.append((-a, prop_var[(q, j)]))
                counts["rule3"] += 1
        for i, node in enumerate(layer.nodes):
            for other in bits(layer.mutex[i]):
                if other > i:
                    clauses.append((-node_var[(node, j)], -node_var[(layer.nodes[other], j)]))
                    counts["rule4"] += 1
    return CnfFormula(p, var_map, clauses, len(g.actions), counts)


def expected_clause_count(g: PlanGraph) -> int:
    """|init| + |goal| + proposition occurrences above 0 + preconditions + mutex pairs."""
    occurrences = sum(len(layer.props) for layer in g.props[1:])
    preconditions = sum(m.bit_count() for layer in g.actions for m in layer.pre)
    mutexes = sum(layer.pair_count() for layer in g.actions)
    return len(g.props[0].props) + len(g.problem.goal) + occurrences + preconditions + mutexes


# -- simplification ----------------------------------------------------------


def _normalise(clause: Iterable[int]) -> tuple[int, ...] | None:
    lits = set(clause)
    if any(-lit in lits for lit in lits):
        return None
    return tuple(sorted(lits, key=lambda x: (abs(x), x)))


def remove_subsumed(clauses: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    unique = list(dict.fromkeys(clauses))
    if () in unique:
        return [()]
    order = sorted(range(len(unique)), key=lambda i: len(unique[i]))
    occurs: dict[int, list[int]] = {}
    kept: list[int] = []
    for i in order:
        c = unique[i]
        cset = set(c)
        subsumed = False
        for lit in c:
            for j in occurs.get(lit, ()):
                if len(unique[j]) <= len(c) and cset.issuperset(unique[j]):
                    subsumed = True
                    break
            if subsumed:
                break
        if subsumed:
            continue
        kept.append(i)
        occurs.setdefault(c[0], []).append(i)
    kept_set = set(kept)
    return [unique[i] for i in range(len(unique)) if i in kept_set]


def simplify(f: CnfFormula) -> CnfFormula:
    """Eliminate every proposition variable by resolution.

    For each proposition, every clause containing it positively is resolved
    with every clause containing it negatively; the originals are dropped.
    Tautologies and subsumed clauses are removed.  The result mentions
    action and noop variables only and has the same action projections of
    its models.
    """
    clauses = [c for c in (_normalise(c) for c in f.clauses) if c is not None]
    props = [v for v, info in f.var_map.items() if info.kind == PROP]
    # eliminate top layers first: their clauses are the ones that grow
    props.sort(key=lambda v: -f.var_map[v].layer)
    pos: dict[int, set[int]] = {}
    neg: dict[int, set[int]] = {}
    store: dict[int, tuple[int, ...]] = {}
    ids = itertools.count()

    def add(c: tuple[int, ...]) -> None:
        cid = next(ids)
        store[cid] = c
        for lit in c:
            (pos if lit > 0 else neg).setdefault(abs(lit), set()).add(cid)

    def drop(cid: int) -> None:
        c = store.pop(cid)
        for lit in c:
            (pos if lit > 0 else neg)[abs(lit)].discard(cid)

    for c in clauses:
        add(c)
    for v in props:
        pcs = [store[c] for c in pos.get(v, ())]
        ncs = [store[c] for c in neg.get(v, ())]
        for cid in list(pos.get(v, ())) + list(neg.get(v, ())):
            if cid in store:
                drop(cid)
        for pc in pcs:
            for nc in ncs:
                r = _normalise([x for x in pc if x != v] + [x for x in nc if x != -v])
                if r is not None:
                    add(r)
                    if not r:
                        break
    result = remove_subsumed(list(store.values()))
    var_map = {v: info for v, info in f.var_map.items() if info.kind != PROP}
    return CnfFormula(f.problem, var_map, result, f.depth, {"simplified": len(result)})


# -- solving and decoding ----------------------------------------------------


def solve_sat(f: CnfFormula, deadline: Deadline = NO_DEADLINE) -> dict[int, bool] | None:
    if any(len(c) == 0 for c in f.clauses):
        return None
    return solve_cnf(f.num_vars, f.clauses, deadline)


def model_records(f: CnfFormula, assignment: dict[int, bool]) -> LayeredPlan:
    """True action and noop variables grouped by layer (noops kept as records)."""
    layers: list[set[Node]] = [set() for _ in range(f.depth)]
    for v, info in f.var_map.items():
        if info.kind == PROP or not assignment.get(v, False):
            continue
        layers[info.layer // 2].add(Node(info.kind == NOOP, info.index))
    return LayeredPlan(tuple(frozenset(layer) for layer in layers))


def decode_model(f: CnfFormula, assignment: dict[int, bool]) -> LayeredPlan:
    """True action variables grouped by layer, noops dropped."""
    return model_records(f, assignment).without_noops()


def support_prune(g: PlanGraph, plan: LayeredPlan) -> LayeredPlan:
    """Keep only the records needed to support the goals, preferring noops.

    Walking down from the goals, each needed proposition is supported by a
    noop when the model chose one, otherwise by the lowest-index chosen
    action adding it.  The kept records are a subset of the model's, so the
    result is again a model of the encoding.
    """
    needs = set(g.problem.goal)
    kept: list[frozenset[Node]] = []
    for j in range(len(plan.layers) - 1, -1, -1):
        chosen = plan.layers[j]
        keep: set[Node] = set()
        for q in sorted(needs):
            if any(q in g.node_sets(n)[1] for n in keep):
                continue
            if Node(True, q) in chosen:
                keep.add(Node(True, q))
                continue
            candidates = sorted(n for n in chosen if not n.noop and q in g.node_sets(n)[1])
            if not candidates:
                raise ValueError(f"model leaves proposition {q} unsupported at layer {2 * j + 2}")
            keep.add(candidates[0])
        needs = set()
        for n in keep:
            needs |= g.node_sets(n)[0]
        kept.append(frozenset(keep))
    return LayeredPlan(tuple(reversed(kept)))


def solve_satplan(
    p: GroundedProblem,
    max_layers: int = 64,
    deadline: Deadline = NO_DEADLINE,
    use_simplify: bool = False,
) -> SolveResult:
    """Expand until the goals appear, encode, solve; expand and retry on UNSAT."""
    g = PlanGraph(p)
    result = SolveResult(Outcome.DEPTH_LIMIT)
    translation = 0.0
    search = 0.0
    last: CnfFormula | None = None
    try:
        while True:
            if g.has_goals():
                t0 = time.perf_counter()
                f = encode(g)
                if use_simplify:
                    f = simplify(f)
                last = f
                translation += time.perf_counter() - t0
                t0 = time.perf_counter()
                model = solve_sat(f, deadline)
                search += time.perf_counter() - t0
                if model is not None:
                    result.outcome = Outcome.PLAN
                    result.plan = support_prune(g, model_records(f, model))
                    result.extra["model"] = model
                    break
            elif g.leveled_off():
                result.outcome = Outcome.UNSOLVABLE
                result.note = "criterion=leveled-off"
                break
            if g.depth >= max_layers:
                break
            deadline.check()
            g.expand()
    except SearchTimeout:
        result.outcome = Outcome.TIMEOUT
    result.extra["graph"] = g
    result.extra["formula"] = last
    result.translation_seconds = translation
    result.search_seconds = search
    result.expansion_seconds = list(g.expansion_times)
    result.mutex_seconds = sum(g.mutex_times)
    return result


# -- DIMACS ------------------------------------------------------------------


def to_dimacs(f: CnfFormula) -> str:
    lines = [
        "c plan-graph encoding; propositions at even layers from 0, actions at odd layers",
    ]
    for v in sorted(f.var_map):
        info = f.var_map[v]
        lines.append(f"c var {v} = {info.kind} {f.var_name(v)} @layer {info.layer}")
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    for c in f.clauses:
        lines.append(" ".join(str(lit) for lit in c) + " 0")
    return "\n".join(lines) + "\n"


_VAR_LINE = re.compile(r"^c var (\d+) = (prop|action|noop) (\(.*\)) @layer (\d+)\s*$")


def parse_dimacs(text: str, problem: GroundedProblem) -> CnfFormula:
    """Read a DIMACS file written by :func:`to_dimacs`, including the variable map."""
    var_map: dict[int, VarInfo] = {}
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            m = _VAR_LINE.match(line)
            if m:
                v, kind, name, layer = int(m.group(1)), m.group(2), m.group(3), int(m.group(4))
                table = problem.symbols.action_index if kind == ACTION else problem.symbols.prop_index
                var_map[v] = VarInfo(kind, table[name], layer)
            continue
        if line.startswith("p"):
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    depth = max((info.layer + 1) // 2 for info in var_map.values() if info.kind != PROP) if any(
        info.kind != PROP for info in var_map.values()
    ) else 0
    return CnfFormula(problem, var_map, clauses, depth)


def parse_model(text: str) -> dict[int, bool]:
    """Accept ``v``-lines (competition format) or bare signed integers."""
    model: dict[int, bool] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(("c", "s")):
            continue
        if line.startswith("v"):
            line = line[1:]
        for tok in line.split():
            lit = int(tok)
            if lit:
                model[abs(lit)] = lit > 0
    return model


def write_dimacs(f: CnfFormula, path: str | Path) -> None:
    Path(path).write_text(to_dimacs(f), encoding="utf-8")
