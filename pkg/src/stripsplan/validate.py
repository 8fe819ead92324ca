"""Plan validation by layer-by-layer simulation."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .ground import GroundedProblem
from .plan import LayeredPlan


class Reason(str, enum.Enum):
    PRECONDITION_VIOLATED = "PreconditionViolated"
    INTERFERENCE_IN_LAYER = "InterferenceInLayer"
    GOAL_NOT_REACHED = "GoalNotReached"


@dataclass(frozen=True)
class Failure:
    layer: int  # 0-based step; the step count for GoalNotReached
    reason: Reason
    detail: str = ""


@dataclass(frozen=True)
class Verdict:
    failure: Failure | None = None

    @property
    def valid(self) -> bool:
        return self.failure is None

    def __str__(self) -> str:
        if self.failure is None:
            return "valid"
        f = self.failure
        return f"invalid: {f.reason.value} at step {f.layer}" + (f" ({f.detail})" if f.detail else "")


VALID = Verdict()


def validate(p: GroundedProblem, plan: LayeredPlan) -> Verdict:
    """Simulate ``plan`` from the initial state.

    Within a step every action's preconditions must hold, no member may
    delete another member's precondition or add effect, and all deletes are
    applied before all adds.  The final state must contain the goal.
    """
    state = p.init_mask
    for k, ids in enumerate(plan.action_layers()):
        actions = [p.actions[a] for a in ids]
        for a in actions:
            missing = a.pre_mask & ~state
            if missing:
                return Verdict(Failure(k, Reason.PRECONDITION_VIOLATED, p.action_name(a.id)))
        for a in actions:
            for b in actions:
                if a.id != b.id and a.del_mask & (b.pre_mask | b.add_mask):
                    detail = f"{p.action_name(a.id)} vs {p.action_name(b.id)}"
                    return Verdict(Failure(k, Reason.INTERFERENCE_IN_LAYER, detail))
        dele = add = 0
        for a in actions:
            dele |= a.del_mask
            add |= a.add_mask
        state = (state & ~dele) | add
    if p.goal_mask & ~state:
        return Verdict(Failure(plan.step_count, Reason.GOAL_NOT_REACHED))
    return VALID
