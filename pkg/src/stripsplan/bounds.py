"""Admissible lower bounds on the number of actions needed to reach a fact set.

The landmark-cut bound repeatedly finds a cut of actions in the justification
graph of the max-cost relaxation; every plan uses at least one action from
each cut, so the sum of cut costs never overestimates.
"""

from __future__ import annotations

from .ground import GroundedProblem, bits

INF = float("inf")


class LandmarkCut:
    """LM-cut from the problem's initial state to arbitrary target sets (unit costs)."""

    def __init__(self, problem: GroundedProblem):
        self.problem = problem
        self.n = problem.prop_count
        self.pre = [bits(a.pre_mask) for a in problem.actions]
        self.add = [bits(a.add_mask) for a in problem.actions]
        self.init = problem.init_mask
        self.cache: dict[int, float] = {}

    def __call__(self, targets: int) -> float:
        targets &= ~self.init
        if not targets:
            return 0
        hit = self.cache.get(targets)
        if hit is None:
            hit = self._compute(targets)
            self.cache[targets] = hit
        return hit

    def _hmax(self, cost: list[float]) -> list[float]:
        h = [INF] * self.n
        for p in bits(self.init):
            h[p] = 0
        changed = True
        pre, add = self.pre, self.add
        while changed:
            changed = False
            for a in range(len(pre)):
                base = 0.0
                for q in pre[a]:
                    v = h[q]
                    if v > base:
                        base = v
                        if base == INF:
                            break
                if base == INF:
                    continue
                c = base + cost[a]
                for p in add[a]:
                    if c < h[p]:
                        h[p] = c
                        changed = True
        return h

    def _compute(self, targets: int) -> float:
        goal = bits(targets)
        cost = [1.0] * len(self.pre)
        total = 0.0
        while True:
            h = self._hmax(cost)
            hg = max(h[p] for p in goal)
            if hg == INF:
                return INF
            if hg == 0:
                return total
            # precondition choice: a precondition of maximal h (-1 for none)
            pcf = []
            for a in range(len(self.pre)):
                best, arg = -1.0, -1
                for q in self.pre[a]:
                    if h[q] > best:
                        best, arg = h[q], q
                pcf.append(arg)
            # goal zone: facts reaching the goal through zero-cost actions
            seed = next(p for p in goal if h[p] == hg)
            zone = {seed}
            frontier = [seed]
            achievers: dict[int, list[int]] = {}
            for a, adds in enumerate(self.add):
                for p in adds:
                    achievers.setdefault(p, []).append(a)
            while frontier:
                p = frontier.pop()
                for a in achievers.get(p, ()):
                    if cost[a] == 0 and pcf[a] >= 0 and pcf[a] not in zone:
                        zone.add(pcf[a])
                        frontier.append(pcf[a])
            # facts reachable from the initial state without entering the zone
            reached = set(bits(self.init))
            frontier = list(reached)
            cut: list[int] = []
            seen_actions = set()
            by_pcf: dict[int, list[int]] = {}
            free: list[int] = []
            for a, q in enumerate(pcf):
                if q < 0:
                    free.append(a)
                else:
                    by_pcf.setdefault(q, []).append(a)

            def visit(a: int) -> None:
                if a in seen_actions:
                    return
                seen_actions.add(a)
                if any(p in zone for p in self.add[a]):
                    cut.append(a)
                    return
                for p in self.add[a]:
                    if p not in reached:
                        reached.add(p)
                        frontier.append(p)

            for a in free:
                visit(a)
            while frontier:
                q = frontier.pop()
                for a in by_pcf.get(q, ()):
                    visit(a)
            if not cut:
                return total
            m = min(cost[a] for a in cut)
            total += m
            for a in cut:
                cost[a] -= m
