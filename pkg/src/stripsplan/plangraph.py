"""Layered plan graph with maintenance actions and mutex propagation.

Graph layers use even numbers for propositions and odd numbers for actions:
proposition layer ``k`` of :attr:`PlanGraph.prop_layers` sits at graph layer
``2k`` and action layer ``j`` (0-based in :attr:`PlanGraph.action_layers`) at
graph layer ``2j + 1``.  Sets are kept as Python ints used as bitsets.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .ground import GroundedProblem, bits, mask_of

RULE_EFFECTS = "1"  # inconsistent effects
RULE_INTERFERENCE = "2"  # one deletes a precondition of the other
RULE_COMPETING = "3"  # competing needs
SUPPORT = "support"  # inconsistent support between propositions


class Node(NamedTuple):
    """Action-layer record: a real action (``noop=False``) or a noop for a proposition.

    Sorting by the tuple puts real actions first in ascending index, then noops.
    """

    noop: bool
    index: int


def act(i: int) -> Node:
    return Node(False, i)


def noop(p: int) -> Node:
    return Node(True, p)


@dataclass
class PropLayer:
    props: frozenset[int]
    mask: int
    partners: dict[int, int]  # prop -> bitset of mutex props (empty entries omitted)

    def is_mutex(self, p: int, q: int) -> bool:
        return bool(self.partners.get(p, 0) >> q & 1)

    def pairs(self) -> dict[tuple[int, int], str]:
        out: dict[tuple[int, int], str] = {}
        for p in sorted(self.partners):
            for q in bits(self.partners[p]):
                if p < q:
                    out[(p, q)] = SUPPORT
        return out

    def pair_count(self) -> int:
        return sum(m.bit_count() for m in self.partners.values()) // 2


@dataclass
class ActionLayer:
    nodes: tuple[Node, ...]
    pre: list[int]
    add: list[int]
    dele: list[int]
    mutex: list[int]  # position -> bitset over positions
    tags: list[dict[int, str]] = field(repr=False)  # position -> {partner position: rule}
    position: dict[Node, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.position = {n: i for i, n in enumerate(self.nodes)}

    def is_mutex(self, a: Node, b: Node) -> bool:
        return bool(self.mutex[self.position[a]] >> self.position[b] & 1)

    def pairs(self) -> dict[tuple[Node, Node], str]:
        out: dict[tuple[Node, Node], str] = {}
        for i, node in enumerate(self.nodes):
            for j, tag in self.tags[i].items():
                if i < j:
                    out[(node, self.nodes[j])] = tag
        return out

    def pair_count(self) -> int:
        return sum(m.bit_count() for m in self.mutex) // 2


class PlanGraph:
    """Alternating proposition/action layers built by :meth:`expand`."""

    def __init__(self, problem: GroundedProblem, relaxed: bool = False, interference_support: bool = False):
        self.problem = problem
        self.relaxed = relaxed or problem.relaxed
        # When set, proposition mutexes are derived from rule 1/2 action
        # mutexes only, so competing needs never feed back into support.
        self.interference_support = interference_support
        self.props: list[PropLayer] = [PropLayer(problem.init, problem.init_mask, {})]
        self.actions: list[ActionLayer] = []
        self.expansion_times: list[float] = []
        self.mutex_times: list[float] = []

    # -- public views ---------------------------------------------------

    @property
    def prop_layers(self) -> list[frozenset[int]]:
        return [layer.props for layer in self.props]

    @property
    def action_layers(self) -> list[tuple[Node, ...]]:
        return [layer.nodes for layer in self.actions]

    @property
    def prop_mutex(self) -> list[dict[tuple[int, int], str]]:
        return [layer.pairs() for layer in self.props]

    @property
    def action_mutex(self) -> list[dict[tuple[Node, Node], str]]:
        return [layer.pairs() for layer in self.actions]

    @property
    def depth(self) -> int:
        """Number of action layers."""
        return len(self.actions)

    def node_sets(self, node: Node) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
        if node.noop:
            s = frozenset((node.index,))
            return s, s, frozenset()
        a = self.problem.actions[node.index]
        return a.pre, a.add, (frozenset() if self.relaxed else a.dele)

    # -- construction ---------------------------------------------------

    def expand(self) -> "PlanGraph":
        t0 = time.perf_counter()
        last = self.props[-1]
        nodes: list[Node] = []
        pre: list[int] = []
        add: list[int] = []
        dele: list[int] = []
        for a in self.problem.actions:
            if a.pre_mask & ~last.mask:
                continue
            if not self.relaxed and any(last.partners.get(p, 0) & a.pre_mask for p in a.pre):
                continue
            nodes.append(Node(False, a.id))
            pre.append(a.pre_mask)
            add.append(a.add_mask)
            dele.append(0 if self.relaxed else a.del_mask)
        for p in sorted(last.props):
            nodes.append(Node(True, p))
            m = 1 << p
            pre.append(m)
            add.append(m)
            dele.append(0)

        new_mask = 0
        for m in add:
            new_mask |= m
        new_props = frozenset(bits(new_mask))
        t1 = time.perf_counter()

        if self.relaxed:
            layer = ActionLayer(tuple(nodes), pre, add, dele, [0] * len(nodes), [{} for _ in nodes])
            self.actions.append(layer)
            self.props.append(PropLayer(new_props, new_mask, {}))
            t2 = time.perf_counter()
            self.expansion_times.append(t2 - t0)
            self.mutex_times.append(0.0)
            return self

        mutex, interference, tags = _action_mutexes(pre, add, dele, last.partners)
        layer = ActionLayer(tuple(nodes), pre, add, dele, mutex, tags)
        partners = _prop_mutexes(new_props, add, interference if self.interference_support else mutex)
        t2 = time.perf_counter()
        self.actions.append(layer)
        self.props.append(PropLayer(new_props, new_mask, partners))
        self.expansion_times.append(t1 - t0)
        self.mutex_times.append(t2 - t1)
        return self

    # -- queries ---------------------------------------------------------

    def has_goals(self, goal: Iterable[int] | None = None) -> bool:
        """Goals all present in the last proposition layer and pairwise non-mutex."""
        goal_set = self.problem.goal if goal is None else frozenset(goal)
        last = self.props[-1]
        gmask = mask_of(goal_set)
        if gmask & ~last.mask:
            return False
        return not any(last.partners.get(p, 0) & gmask for p in goal_set)

    def leveled_off(self) -> bool:
        if len(self.props) < 2:
            return False
        a, b = self.props[-2], self.props[-1]
        return a.mask == b.mask and a.partners == b.partners

    def counts(self) -> tuple[int, int, int]:
        """(nodes, edges, mutexes): edges count precondition and add arcs."""
        nodes = sum(len(p.props) for p in self.props) + sum(len(a.nodes) for a in self.actions)
        edges = 0
        for layer in self.actions:
            for pm, am in zip(layer.pre, layer.add):
                edges += pm.bit_count() + am.bit_count()
        mutexes = sum(p.pair_count() for p in self.props) + sum(a.pair_count() for a in self.actions)
        return nodes, edges, mutexes

    def producers(self, layer: int, p: int) -> list[Node]:
        """Nodes of action layer ``layer`` (0-based) that add ``p``, in producer order."""
        al = self.actions[layer]
        return [n for n, m in zip(al.nodes, al.add) if m >> p & 1]


def _action_mutexes(
    pre: list[int], add: list[int], dele: list[int], prev_partners: dict[int, int]
) -> tuple[list[int], list[int], list[dict[int, str]]]:
    n = len(pre)
    adders: dict[int, int] = {}
    deleters: dict[int, int] = {}
    needers: dict[int, int] = {}
    for i in range(n):
        bit = 1 << i
        for p in bits(add[i]):
            adders[p] = adders.get(p, 0) | bit
        for p in bits(dele[i]):
            deleters[p] = deleters.get(p, 0) | bit
        for p in bits(pre[i]):
            needers[p] = needers.get(p, 0) | bit

    mutex = [0] * n
    interference = [0] * n
    tags: list[dict[int, str]] = [{} for _ in range(n)]
    for i in range(n):
        r1 = 0
        for p in bits(add[i]):
            r1 |= deleters.get(p, 0)
        r2 = 0
        for p in bits(dele[i]):
            r1 |= adders.get(p, 0)
            r2 |= needers.get(p, 0)
        for p in bits(pre[i]):
            r2 |= deleters.get(p, 0)
        competing = 0
        for p in bits(pre[i]):
            competing |= prev_partners.get(p, 0)
        r3 = 0
        for q in bits(competing):
            r3 |= needers.get(q, 0)
        self_bit = ~(1 << i)
        r1 &= self_bit
        r2 &= self_bit & ~r1
        r3 &= self_bit & ~r1 & ~r2
        interference[i] = r1 | r2
        mutex[i] = r1 | r2 | r3
        t = tags[i]
        for j in bits(r1):
            t[j] = RULE_EFFECTS
        for j in bits(r2):
            t[j] = RULE_INTERFERENCE
        for j in bits(r3):
            t[j] = RULE_COMPETING
    return mutex, interference, tags


def _prop_mutexes(props: frozenset[int], add: list[int], mutex: list[int]) -> dict[int, int]:
    producers: dict[int, int] = {}
    for i, m in enumerate(add):
        for p in bits(m):
            producers[p] = producers.get(p, 0) | (1 << i)
    common: dict[int, int] = {}
    for p in props:
        c = -1
        for i in bits(producers[p]):
            c &= mutex[i]
        common[p] = c
    partners: dict[int, int] = {}
    ordered = sorted(props)
    for x, p in enumerate(ordered):
        cp = common[p]
        if not cp:
            continue
        for q in ordered[x + 1:]:
            if producers[q] & ~cp == 0:
                partners[p] = partners.get(p, 0) | (1 << q)
                partners[q] = partners.get(q, 0) | (1 << p)
    return partners


def init_graph(p: GroundedProblem, relaxed: bool = False) -> PlanGraph:
    return PlanGraph(p, relaxed)


def expand(g: PlanGraph) -> PlanGraph:
    return g.expand()


def build_until_goals(p: GroundedProblem, relaxed: bool = False, max_layers: int = 64) -> PlanGraph:
    """Expand until the goals appear non-mutex, the graph levels off, or the cap is hit."""
    g = PlanGraph(p, relaxed)
    while not g.has_goals() and g.depth < max_layers:
        g.expand()
        if not g.has_goals() and g.leveled_off():
            break
    return g


def node_label(g: PlanGraph, node: Node) -> str:
    if node.noop:
        return f"noop{g.problem.prop_name(node.index)}"
    return g.problem.action_name(node.index)


def dump_graph(g: PlanGraph) -> str:
    """One stanza per layer: member count, mutex count, members by name."""
    out: list[str] = []
    for k, layer in enumerate(g.props):
        out.append(f"layer {2 * k} props members={len(layer.props)} mutexes={layer.pair_count()}")
        out.extend("  " + g.problem.prop_name(p) for p in sorted(layer.props))
        out.append("")
        if k < len(g.actions):
            al = g.actions[k]
            out.append(f"layer {2 * k + 1} actions members={len(al.nodes)} mutexes={al.pair_count()}")
            out.extend("  " + node_label(g, n) for n in al.nodes)
            out.append("")
    return "\n".join(out)
