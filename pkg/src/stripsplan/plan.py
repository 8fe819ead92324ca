"""Layered plans and their text format.

The text format has one line per step, ``k: (name obj ...) (name ...)`` with
0-based ``k`` and noops omitted, followed by ``actions=N steps=M``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .ground import GroundedProblem
from .plangraph import Node


class PlanFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LayeredPlan:
    layers: tuple[frozenset[Node], ...]

    @classmethod
    def from_actions(cls, layers: Iterable[Iterable[int]]) -> "LayeredPlan":
        return cls(tuple(frozenset(Node(False, a) for a in layer) for layer in layers))

    @classmethod
    def sequential(cls, actions: Sequence[int]) -> "LayeredPlan":
        return cls.from_actions([a] for a in actions)

    @property
    def step_count(self) -> int:
        return len(self.layers)

    @property
    def action_count(self) -> int:
        return sum(1 for layer in self.layers for n in layer if not n.noop)

    def actions_at(self, k: int) -> list[int]:
        return sorted(n.index for n in self.layers[k] if not n.noop)

    def action_layers(self) -> list[list[int]]:
        return [self.actions_at(k) for k in range(len(self.layers))]

    def without_noops(self) -> "LayeredPlan":
        return LayeredPlan.from_actions(self.action_layers())


EMPTY_PLAN = LayeredPlan(())


def format_plan(plan: LayeredPlan, problem: GroundedProblem) -> str:
    lines = []
    for k, ids in enumerate(plan.action_layers()):
        names = " ".join(problem.action_name(a) for a in ids)
        lines.append(f"{k}: {names}".rstrip())
    lines.append(f"actions={plan.action_count} steps={plan.step_count}")
    return "\n".join(lines) + "\n"


_STEP = re.compile(r"^\s*(\d+)\s*:(.*)$")
_GROUP = re.compile(r"\(([^()]*)\)")


def parse_plan(text: str, problem: GroundedProblem) -> LayeredPlan:
    """Read the plan text format back into a :class:`LayeredPlan`."""
    steps: dict[int, list[int]] = {}
    index = problem.symbols.action_index
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line or line.startswith("actions="):
            continue
        m = _STEP.match(line)
        if not m:
            raise PlanFormatError(f"line {lineno}: expected 'k: (action ...)'")
        k = int(m.group(1))
        ids = []
        for group in _GROUP.findall(m.group(2)):
            name = "(" + " ".join(group.lower().split()) + ")"
            if name not in index:
                raise PlanFormatError(f"line {lineno}: unknown action {name}")
            ids.append(index[name])
        steps.setdefault(k, []).extend(ids)
    depth = max(steps) + 1 if steps else 0
    return LayeredPlan.from_actions(steps.get(k, []) for k in range(depth))
