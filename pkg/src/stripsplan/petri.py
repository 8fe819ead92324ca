"""Petri-net encoding of plan graphs and 0/1 sub-marking reachability.

Translation of a plan graph follows five rules:

* an action node (noops included) becomes one transition;
* a proposition node becomes a place feeding a transition of its own;
* an effect edge becomes an arc from the action transition to the place;
* a precondition edge becomes a place between the proposition transition and
  the action transition;
* a mutex pair of actions becomes a place holding one token with an arc to
  each of the two transitions.

Proposition mutexes produce no structure.  The net is acyclic and every arc
has weight 1, so each transition fires at most once and a plan is a 0/1
firing vector.  :func:`solve_submarking` searches those vectors depth-first
with branch and bound on the number of real (non-noop) action transitions.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .bounds import LandmarkCut
from .ground import GroundedProblem, bits
from .plan import LayeredPlan
from .plangraph import ActionLayer, Node, PlanGraph, PropLayer
from .report import NO_DEADLINE, Deadline, Outcome, SearchTimeout, SolveResult


class RelaxedGraphRejected(ValueError):
    pass


class NotEnabled(Exception):
    def __init__(self, transition: int, place: int):
        self.transition = transition
        self.place = place
        super().__init__(f"transition {transition} is not enabled: place {place} is empty")


class Infeasible(Exception):
    pass


class PropPlace(NamedTuple):
    prop: int
    layer: int


class PrecondPlace(NamedTuple):
    node: Node
    prop: int
    layer: int


class MutexPlace(NamedTuple):
    a: Node
    b: Node
    layer: int


class ActionTrans(NamedTuple):
    node: Node
    layer: int


class PropTrans(NamedTuple):
    prop: int
    layer: int


PlaceRole = Union[PropPlace, PrecondPlace, MutexPlace]
TransRole = Union[ActionTrans, PropTrans]


@dataclass
class PetriNet:
    problem: GroundedProblem
    places: list[PlaceRole] = field(default_factory=list)
    transitions: list[TransRole] = field(default_factory=list)
    inputs: list[list[int]] = field(default_factory=list)  # transition -> places consumed
    outputs: list[list[int]] = field(default_factory=list)  # transition -> places produced
    initial_marking: list[int] = field(default_factory=list)
    goal_places: frozenset[int] = frozenset()
    depth: int = 0  # number of action layers
    prop_place: dict[tuple[int, int], int] = field(default_factory=dict)  # (prop, layer) -> place
    prop_trans: dict[tuple[int, int], int] = field(default_factory=dict)
    action_trans: dict[tuple[Node, int], int] = field(default_factory=dict)

    def add_place(self, role: PlaceRole, tokens: int = 0) -> int:
        self.places.append(role)
        self.initial_marking.append(tokens)
        idx = len(self.places) - 1
        if isinstance(role, PropPlace):
            self.prop_place[(role.prop, role.layer)] = idx
        return idx

    def add_transition(self, role: TransRole) -> int:
        self.transitions.append(role)
        self.inputs.append([])
        self.outputs.append([])
        idx = len(self.transitions) - 1
        if isinstance(role, PropTrans):
            self.prop_trans[(role.prop, role.layer)] = idx
        else:
            self.action_trans[(role.node, role.layer)] = idx
        return idx

    def arc_count(self) -> int:
        return sum(len(i) for i in self.inputs) + sum(len(o) for o in self.outputs)

    def stats(self) -> dict[str, int]:
        """Incidence-matrix view: rows are places, columns transitions."""
        return {
            "rows": len(self.places),
            "columns": len(self.transitions),
            "nonzeros": self.arc_count(),
            "conflicts": sum(1 for r in self.places if isinstance(r, MutexPlace)),
        }

    def role_counts(self) -> dict[str, int]:
        out = {"PropPlace": 0, "PrecondPlace": 0, "MutexPlace": 0, "ActionTrans": 0, "PropTrans": 0}
        for r in self.places:
            out[type(r).__name__] += 1
        for r in self.transitions:
            out[type(r).__name__] += 1
        return out

    @property
    def final_layer(self) -> int:
        return 2 * self.depth

    def goal_props(self) -> frozenset[int]:
        return self.problem.goal


# -- construction ----------------------------------------------------------


def _add_prop_layer(net: PetriNet, layer: PropLayer, graph_layer: int, initial: bool) -> None:
    for p in sorted(layer.props):
        place = net.add_place(PropPlace(p, graph_layer), 1 if initial else 0)
        t = net.add_transition(PropTrans(p, graph_layer))
        net.inputs[t].append(place)


def _add_action_layer(net: PetriNet, layer: ActionLayer, graph_layer: int) -> None:
    below = graph_layer - 1
    above = graph_layer + 1
    trans: list[int] = []
    for pos, node in enumerate(layer.nodes):
        t = net.add_transition(ActionTrans(node, graph_layer))
        trans.append(t)
        for p in bits(layer.pre[pos]):
            place = net.add_place(PrecondPlace(node, p, graph_layer))
            net.outputs[net.prop_trans[(p, below)]].append(place)
            net.inputs[t].append(place)
    for i, node in enumerate(layer.nodes):
        for j in bits(layer.mutex[i]):
            if j > i:
                place = net.add_place(MutexPlace(node, layer.nodes[j], graph_layer), 1)
                net.inputs[trans[i]].append(place)
                net.inputs[trans[j]].append(place)
    for pos, t in enumerate(trans):
        for q in bits(layer.add[pos]):
            net.outputs[t].append(net.prop_place[(q, above)])


def _finish(net: PetriNet) -> None:
    top = net.final_layer
    net.goal_places = frozenset(
        net.prop_place[(g, top)] for g in net.problem.goal if (g, top) in net.prop_place
    )


def translate(g: PlanGraph) -> PetriNet:
    """Translate a full plan graph into a Petri net."""
    if g.relaxed:
        raise RelaxedGraphRejected("relaxed graphs carry no conflicts to translate")
    net = PetriNet(g.problem)
    _add_prop_layer(net, g.props[0], 0, True)
    for j, layer in enumerate(g.actions):
        # the next proposition layer's places must exist before effect arcs
        _add_prop_places_only(net, g.props[j + 1], 2 * j + 2)
        _add_action_layer(net, layer, 2 * j + 1)
        _add_prop_transitions_only(net, g.props[j + 1], 2 * j + 2)
    net.depth = len(g.actions)
    _finish(net)
    return net


def _add_prop_places_only(net: PetriNet, layer: PropLayer, graph_layer: int) -> None:
    for p in sorted(layer.props):
        net.add_place(PropPlace(p, graph_layer))


def _add_prop_transitions_only(net: PetriNet, layer: PropLayer, graph_layer: int) -> None:
    for p in sorted(layer.props):
        t = net.add_transition(PropTrans(p, graph_layer))
        net.inputs[t].append(net.prop_place[(p, graph_layer)])


class DirectNetBuilder:
    """Build a net layer by layer straight from the grounded problem.

    Proposition mutexes come from interference (rules 1 and 2) only, so
    competing needs never recur through inconsistent support; the resulting
    net has fewer conflict places.  Once two consecutive proposition layers
    coincide, later layers are copies of the last one with shifted layer
    numbers and no mutex computation.
    """

    def __init__(self, problem: GroundedProblem):
        self.problem = problem
        self.graph = PlanGraph(problem, interference_support=True)
        self.net = PetriNet(problem)
        self.expansion_times: list[float] = []
        self.mutex_times: list[float] = []
        self.stagnant_from: int | None = None  # 1-based expansion number
        _add_prop_layer(self.net, self.graph.props[0], 0, True)
        _finish(self.net)

    @property
    def depth(self) -> int:
        return self.net.depth

    def expand(self) -> "DirectNetBuilder":
        t0 = time.perf_counter()
        g = self.graph
        j = len(g.actions)
        if self.stagnant_from is None and g.leveled_off():
            self.stagnant_from = j + 1
        if self.stagnant_from is not None:
            g.props.append(g.props[-1])
            g.actions.append(g.actions[-1])
            self._copy_last_layer()
            self.mutex_times.append(0.0)
        else:
            g.expand()
            mutex_time = g.mutex_times[-1]
            _add_prop_places_only(self.net, g.props[j + 1], 2 * j + 2)
            _add_action_layer(self.net, g.actions[j], 2 * j + 1)
            _add_prop_transitions_only(self.net, g.props[j + 1], 2 * j + 2)
            self.mutex_times.append(mutex_time)
        self.net.depth = j + 1
        _finish(self.net)
        self.expansion_times.append(time.perf_counter() - t0 - self.mutex_times[-1])
        return self

    def _copy_last_layer(self) -> None:
        """Re-emit the last layer's stored structure two graph layers higher."""
        net = self.net
        j = net.depth
        _add_prop_places_only(net, self.graph.props[-1], 2 * j + 2)
        _add_action_layer(net, self.graph.actions[-1], 2 * j + 1)
        _add_prop_transitions_only(net, self.graph.props[-1], 2 * j + 2)

    def has_goals(self) -> bool:
        """Goal places exist at the top layer and no goal pair has all producer pairs in conflict."""
        net = self.net
        top = net.final_layer
        goal = sorted(self.problem.goal)
        places = []
        for g in goal:
            place = net.prop_place.get((g, top))
            if place is None:
                return False
            places.append(place)
        if top == 0:
            return True
        producers = _place_producers(net, top)
        conflicts = _conflict_partners(net, top - 1)
        for x, p in enumerate(places):
            for q in places[x + 1:]:
                if all(b in conflicts.get(a, ()) for a in producers[p] for b in producers[q]):
                    return False
        return True

    def leveled_off(self) -> bool:
        return self.graph.leveled_off()


def _place_producers(net: PetriNet, layer: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for t, role in enumerate(net.transitions):
        if isinstance(role, ActionTrans) and role.layer == layer - 1:
            for place in net.outputs[t]:
                out.setdefault(place, []).append(t)
    return out


def _conflict_partners(net: PetriNet, layer: int) -> dict[int, set[int]]:
    consumers: dict[int, list[int]] = {}
    for t, role in enumerate(net.transitions):
        if isinstance(role, ActionTrans) and role.layer == layer:
            for place in net.inputs[t]:
                if isinstance(net.places[place], MutexPlace):
                    consumers.setdefault(place, []).append(t)
    out: dict[int, set[int]] = {}
    for a, b in consumers.values():
        out.setdefault(a, set()).add(b)
        out.setdefault(b, set()).add(a)
    return out


def build_direct(p: GroundedProblem) -> DirectNetBuilder:
    return DirectNetBuilder(p)


# -- firing ----------------------------------------------------------------


@dataclass(frozen=True)
class FiringSet:
    fired: frozenset[int]

    def order(self, net: PetriNet) -> list[int]:
        """A topological firing order: by layer, ties by transition index."""
        return sorted(self.fired, key=lambda t: (net.transitions[t].layer, t))


def fire(net: PetriNet, marking: list[int], t: int) -> list[int]:
    out = list(marking)
    _fire_in_place(net, out, t)
    return out


def _fire_in_place(net: PetriNet, marking: list[int], t: int) -> None:
    for place in net.inputs[t]:
        if marking[place] < 1:
            raise NotEnabled(t, place)
    for place in net.inputs[t]:
        marking[place] -= 1
    for place in net.outputs[t]:
        marking[place] += 1


def replay(net: PetriNet, firing: FiringSet) -> list[int]:
    marking = list(net.initial_marking)
    for t in firing.order(net):
        _fire_in_place(net, marking, t)
    return marking


def covers_goal(net: PetriNet, marking: list[int]) -> bool:
    if len(net.goal_places) < len(net.problem.goal):
        return False
    return all(marking[p] >= 1 for p in net.goal_places)


# -- sub-marking reachability ----------------------------------------------


class _Index:
    """Per-layer adjacency of a translated net, derived from its arcs.

    With ``presolve`` the index also derives exclusions implied by the
    structure: two proposition places are exclusive when every pair of their
    producers conflicts, and two action transitions conflict when they need
    exclusive places.  Transitions needing two exclusive places are dead.
    All of this is implied by the token flow, so pruning with it is sound.
    """

    def __init__(self, net: PetriNet, presolve: bool = True):
        self.net = net
        n_layers = net.depth
        self.producers: dict[int, list[int]] = {}  # prop place -> action transitions
        self.needs: dict[int, int] = {}  # action transition -> bitset of prop places it needs
        self.conflicts: dict[int, int] = {}  # action transition -> bitset of transitions
        self.cost: dict[int, int] = {}
        source_of: dict[int, int] = {}  # precondition place -> prop place feeding it
        for t, role in enumerate(net.transitions):
            if isinstance(role, PropTrans):
                (place,) = net.inputs[t]
                for out in net.outputs[t]:
                    source_of[out] = place
        mutex_consumers: dict[int, list[int]] = {}
        for t, role in enumerate(net.transitions):
            if not isinstance(role, ActionTrans):
                continue
            self.cost[t] = 0 if role.node.noop else 1
            need = 0
            for place in net.inputs[t]:
                prole = net.places[place]
                if isinstance(prole, MutexPlace):
                    mutex_consumers.setdefault(place, []).append(t)
                else:
                    need |= 1 << source_of[place]
            self.needs[t] = need
            self.conflicts[t] = 0
            for place in net.outputs[t]:
                self.producers.setdefault(place, []).append(t)
        for a, b in mutex_consumers.values():
            self.conflicts[a] |= 1 << b
            self.conflicts[b] |= 1 << a
        self.layer_places: list[int] = [0] * (n_layers + 1)
        for place, role in enumerate(net.places):
            if isinstance(role, PropPlace):
                self.layer_places[role.layer // 2] |= 1 << place
        # producer order: real actions by index, then noops
        for place, ts in self.producers.items():
            ts.sort(key=lambda t: (net.transitions[t].node, t))
        self.prop_trans_of = {net.inputs[t][0]: t for t, r in enumerate(net.transitions) if isinstance(r, PropTrans)}
        self.out_mask = {t: sum(1 << place for place in net.outputs[t]) for t in self.needs}
        self.place_prop = {place: role.prop for place, role in enumerate(net.places) if isinstance(role, PropPlace)}
        self.exclusive: dict[int, int] = {}
        self.dead: set[int] = set()
        if presolve:
            self._presolve()

    def _presolve(self) -> None:
        net = self.net
        by_layer: dict[int, list[int]] = {}
        for t in self.needs:
            by_layer.setdefault(net.transitions[t].layer, []).append(t)
        excl = self.exclusive
        for j in range(net.depth):
            trans = by_layer.get(2 * j + 1, [])
            alive = []
            for t in trans:
                need = self.needs[t]
                if any(excl.get(p, 0) & need for p in bits(need)):
                    self.dead.add(t)
                else:
                    alive.append(t)
            reach: dict[int, int] = {}
            for t in alive:
                r = 0
                for p in bits(self.needs[t]):
                    r |= excl.get(p, 0)
                reach[t] = r
            for x, t in enumerate(alive):
                rt, nt = reach[t], self.needs[t]
                for u in alive[x + 1:]:
                    if rt & self.needs[u] or reach[u] & nt:
                        self.conflicts[t] |= 1 << u
                        self.conflicts[u] |= 1 << t
            produced: dict[int, int] = {}
            for t in alive:
                for place in net.outputs[t]:
                    produced[place] = produced.get(place, 0) | (1 << t)
            places = sorted(produced)
            common = {}
            for place in places:
                c = -1
                for t in bits(produced[place]):
                    c &= self.conflicts[t]
                common[place] = c
            for x, place in enumerate(places):
                cp = common[place]
                if not cp:
                    continue
                for other in places[x + 1:]:
                    if produced[other] & ~cp == 0:
                        excl[place] = excl.get(place, 0) | (1 << other)
                        excl[other] = excl.get(other, 0) | (1 << place)
        if self.dead:
            for place, ts in self.producers.items():
                self.producers[place] = [t for t in ts if t not in self.dead]


INF = float("inf")


class SubmarkingSolver:
    """Depth-first branch and bound over layers, from the goal places down.

    A search state is a layer plus the set of proposition places that must be
    marked there.  Covering it means choosing conflict-free action transitions
    in the layer below whose outputs include every needed place; their
    precondition places then determine the needs one layer further down.
    Results are memoised as exact minima or as lower bounds when the search
    was cut off by the incumbent.
    """

    def __init__(self, net: PetriNet, deadline: Deadline = NO_DEADLINE, bound: LandmarkCut | None = None):
        self.net = net
        self.index = _Index(net)
        self.deadline = deadline
        self.exact: dict[tuple[int, int], float] = {}
        self.lower: dict[tuple[int, int], float] = {}
        self.choice: dict[tuple[int, int], tuple[int, ...]] = {}
        self.calls = 0
        self.bound = bound if bound is not None else LandmarkCut(net.problem)

    def lower_bound(self, needs: int) -> float:
        """Admissible bound on the real actions still needed to mark ``needs``."""
        targets = 0
        for place in bits(needs):
            targets |= 1 << self.index.place_prop[place]
        return self.bound(targets)

    def solve(self) -> FiringSet:
        net = self.net
        if not covers_goal_structurally(net):
            raise Infeasible()
        needs = 0
        for place in net.goal_places:
            needs |= 1 << place
        cost = self._search(net.depth, needs, INF)
        if cost is None or cost == INF:
            raise Infeasible()
        return self._firing_set(net.depth, needs)

    def _search(self, k: int, needs: int, budget: float) -> float | None:
        """Minimum cost to mark ``needs`` at proposition layer ``k`` if below ``budget``."""
        if k == 0:
            return 0
        key = (k, needs)
        if key in self.exact:
            c = self.exact[key]
            return c if c < budget or c == INF else None
        if self.lower.get(key, 0) >= budget:
            return None
        bound = self.lower_bound(needs)
        if bound == INF:
            self.exact[key] = INF
            return INF
        if bound >= budget:
            self.lower[key] = max(self.lower.get(key, 0), budget)
            return None
        self.calls += 1
        if self.calls & 0xFF == 0:
            self.deadline.check()

        idx = self.index
        order = sorted(bits(needs), reverse=True)
        best: float = INF
        best_choice: tuple[int, ...] | None = None
        limit = budget
        chosen: list[int] = []
        cut = False

        def assign(i: int, covered: int, blocked: int, cost: int) -> None:
            nonlocal best, best_choice, limit, cut
            while i < len(order) and covered >> order[i] & 1:
                i += 1
            if i == len(order):
                below = 0
                for x, t in enumerate(chosen):
                    others = 0
                    for y, u in enumerate(chosen):
                        if y != x:
                            others |= idx.out_mask[u]
                    if idx.out_mask[t] & needs & ~others == 0:
                        return  # dominated by the cover without t
                    below |= idx.needs[t]
                sub = self._search(k - 1, below, limit - cost)
                if sub is None:
                    cut = True
                    return
                if sub == INF:
                    return
                total = cost + sub
                if total < best:
                    best = total
                    best_choice = tuple(chosen)
                    limit = min(limit, best)
                return
            for t in idx.producers.get(order[i], ()):
                if blocked >> t & 1:
                    continue
                c = cost + idx.cost[t]
                if c >= limit:
                    cut = True
                    continue
                chosen.append(t)
                assign(i + 1, covered | idx.out_mask[t], blocked | idx.conflicts[t], c)
                chosen.pop()

        assign(0, 0, 0, 0)
        if best < INF and best < budget:
            self.exact[key] = best
            self.choice[key] = best_choice  # type: ignore[assignment]
            return best
        if not cut:
            self.exact[key] = INF
            return INF
        self.lower[key] = max(self.lower.get(key, 0), budget)
        return None

    def _firing_set(self, k: int, needs: int) -> FiringSet:
        fired: set[int] = set()
        idx = self.index
        while k > 0:
            chosen = self.choice[(k, needs)]
            below = 0
            for t in chosen:
                fired.add(t)
                below |= idx.needs[t]
            for place in bits(below):
                fired.add(idx.prop_trans_of[place])
            needs = below
            k -= 1
        return FiringSet(frozenset(fired))


def covers_goal_structurally(net: PetriNet) -> bool:
    return len(net.goal_places) == len(net.problem.goal)


def solve_submarking(net: PetriNet, deadline: Deadline = NO_DEADLINE) -> FiringSet:
    """Minimum-real-action firing vector reaching the goal sub-marking, or :class:`Infeasible`."""
    return SubmarkingSolver(net, deadline).solve()


def decode_plan(net: PetriNet, firing: FiringSet) -> LayeredPlan:
    layers: list[set[Node]] = [set() for _ in range(net.depth)]
    for t in firing.fired:
        role = net.transitions[t]
        if isinstance(role, ActionTrans):
            layers[role.layer // 2].add(role.node)
    return LayeredPlan(tuple(frozenset(layer) for layer in layers))


def enumerate_min_firing(net: PetriNet) -> tuple[bool, float]:
    """Exhaustive oracle: try every subset of action transitions.

    Proposition transitions fire greedily (all enabled ones below the top
    layer), which never hurts because they only feed precondition places.
    Returns (feasible, minimum real-action count).
    """
    actions = [t for t, r in enumerate(net.transitions) if isinstance(r, ActionTrans)]
    prop_by_layer: dict[int, list[int]] = {}
    for t, r in enumerate(net.transitions):
        if isinstance(r, PropTrans) and r.layer < net.final_layer:
            prop_by_layer.setdefault(r.layer, []).append(t)
    best = INF
    for size in range(len(actions) + 1):
        for subset in itertools.combinations(actions, size):
            cost = sum(1 for t in subset if not net.transitions[t].node.noop)
            if cost >= best:
                continue
            by_layer: dict[int, list[int]] = {}
            for t in subset:
                by_layer.setdefault(net.transitions[t].layer, []).append(t)
            marking = list(net.initial_marking)
            ok = True
            for layer in range(net.final_layer):
                if layer % 2 == 0:
                    for t in prop_by_layer.get(layer, ()):
                        if all(marking[p] >= 1 for p in net.inputs[t]):
                            _fire_in_place(net, marking, t)
                else:
                    for t in by_layer.get(layer, ()):
                        try:
                            _fire_in_place(net, marking, t)
                        except NotEnabled:
                            ok = False
                            break
                if not ok:
                    break
            if ok and covers_goal(net, marking):
                best = cost
    return best < INF, best


# -- planner loops -----------------------------------------------------------


def _solve_loop(p: GroundedProblem, builder, max_layers: int, deadline: Deadline, translate_each: bool) -> SolveResult:
    result = SolveResult(Outcome.DEPTH_LIMIT)
    translation = 0.0
    search = 0.0
    net: PetriNet | None = None
    try:
        while True:
            if builder.has_goals():
                t0 = time.perf_counter()
                net = translate(builder) if translate_each else builder.net
                translation += time.perf_counter() - t0
                t0 = time.perf_counter()
                try:
                    firing = solve_submarking(net, deadline)
                except Infeasible:
                    firing = None
                search += time.perf_counter() - t0
                if firing is not None:
                    result.outcome = Outcome.PLAN
                    result.plan = decode_plan(net, firing)
                    result.extra["firing"] = firing
                    break
            elif builder.leveled_off():
                result.outcome = Outcome.UNSOLVABLE
                result.note = "criterion=leveled-off"
                break
            if builder.depth >= max_layers:
                break
            deadline.check()
            builder.expand()
    except SearchTimeout:
        result.outcome = Outcome.TIMEOUT
    if net is None:
        t0 = time.perf_counter()
        net = translate(builder) if translate_each else builder.net
        translation += time.perf_counter() - t0
    result.extra["net"] = net
    result.translation_seconds = translation
    result.search_seconds = search
    result.expansion_seconds = list(builder.expansion_times)
    result.mutex_seconds = sum(builder.mutex_times)
    return result


def solve_petriplan1(p: GroundedProblem, max_layers: int = 64, deadline: Deadline = NO_DEADLINE) -> SolveResult:
    """Build the full plan graph, translate it, and solve reachability; expand on failure."""
    g = PlanGraph(p)
    result = _solve_loop(p, g, max_layers, deadline, translate_each=True)
    result.extra["graph"] = g
    return result


def solve_petriplan2(p: GroundedProblem, max_layers: int = 64, deadline: Deadline = NO_DEADLINE) -> SolveResult:
    """Build the net directly, layer by layer, and solve reachability; expand on failure."""
    builder = DirectNetBuilder(p)
    result = _solve_loop(p, builder, max_layers, deadline, translate_each=False)
    result.extra["builder"] = builder
    result.extra["stagnant_from"] = builder.stagnant_from
    return result


def format_net(net: PetriNet) -> str:
    """Text export: places, transitions, arcs, then the statistics block."""

    def node_text(node: Node) -> str:
        if node.noop:
            return f"noop{net.problem.prop_name(node.index)}"
        return net.problem.action_name(node.index)

    def place_text(role: PlaceRole) -> str:
        if isinstance(role, PropPlace):
            return f"prop {net.problem.prop_name(role.prop)} @{role.layer}"
        if isinstance(role, PrecondPlace):
            return f"pre {node_text(role.node)} {net.problem.prop_name(role.prop)} @{role.layer}"
        return f"mutex {node_text(role.a)} {node_text(role.b)} @{role.layer}"

    def trans_text(role: TransRole) -> str:
        if isinstance(role, PropTrans):
            return f"prop {net.problem.prop_name(role.prop)} @{role.layer}"
        return f"action {node_text(role.node)} @{role.layer}"

    lines = []
    for i, role in enumerate(net.places):
        goal = " goal" if i in net.goal_places else ""
        lines.append(f"P {i} {place_text(role)} {net.initial_marking[i]}{goal}")
    for t, role in enumerate(net.transitions):
        lines.append(f"T {t} {trans_text(role)}")
    for t in range(len(net.transitions)):
        for place in net.inputs[t]:
            lines.append(f"A {place} -> {t}")
        for place in net.outputs[t]:
            lines.append(f"A {t} -> {place}")
    stats = net.stats()
    lines.extend(f"# {k} {v}" for k, v in stats.items())
    return "\n".join(lines) + "\n"


def expected_counts(g: PlanGraph) -> dict[str, int]:
    """Structure sizes a translation of ``g`` must have, computed from the graph alone."""
    prop_nodes = sum(len(layer.props) for layer in g.props)
    action_nodes = sum(len(layer.nodes) for layer in g.actions)
    pre_edges = sum(m.bit_count() for layer in g.actions for m in layer.pre)
    add_edges = sum(m.bit_count() for layer in g.actions for m in layer.add)
    mutex_pairs = sum(layer.pair_count() for layer in g.actions)
    return {
        "transitions": action_nodes + prop_nodes,
        "places": prop_nodes + pre_edges + mutex_pairs,
        "arcs": prop_nodes + 2 * pre_edges + add_edges + 2 * mutex_pairs,
        "tokens": len(g.props[0].props) + mutex_pairs,
        "conflicts": mutex_pairs,
    }
