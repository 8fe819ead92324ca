"""A small DPLL SAT solver with two-watched-literal unit propagation.

Branching takes the first unassigned variable by id and tries ``True``
first.  Conflicts are analysed to the first unique implication point; the
learned clause is kept and the search jumps back to its asserting level.
Literals are non-zero ints in the DIMACS convention.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .report import NO_DEADLINE, Deadline


class Dpll:
    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]], deadline: Deadline = NO_DEADLINE):
        self.n = num_vars
        self.deadline = deadline
        self.value: list[int] = [0] * (num_vars + 1)  # 0 unassigned, 1 true, -1 false
        self.level: list[int] = [0] * (num_vars + 1)
        self.reason: list[int] = [-1] * (num_vars + 1)  # clause index, -1 for decisions
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.watches: dict[int, list[int]] = {}
        self.clauses: list[list[int]] = []
        self.units: list[int] = []
        self.empty = False
        self.decisions = 0
        self.conflicts = 0
        self.learned = 0
        for raw in clauses:
            clause = list(dict.fromkeys(raw))
            if any(-lit in clause for lit in clause):
                continue
            if not clause:
                self.empty = True
            elif len(clause) == 1:
                self.units.append(clause[0])
            else:
                self._attach(clause)

    def _attach(self, clause: list[int]) -> int:
        idx = len(self.clauses)
        self.clauses.append(clause)
        self.watches.setdefault(clause[0], []).append(idx)
        self.watches.setdefault(clause[1], []).append(idx)
        return idx

    def _lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def _assign(self, lit: int, reason: int) -> None:
        var = abs(lit)
        self.value[var] = 1 if lit > 0 else -1
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)

    def _propagate(self, head: int) -> tuple[int, int]:
        """Propagate trail entries from ``head``; returns (new head, conflict clause or -1)."""
        value = self.value
        clauses = self.clauses
        while head < len(self.trail):
            false_lit = -self.trail[head]
            head += 1
            watching = self.watches.get(false_lit)
            if not watching:
                continue
            keep: list[int] = []
            i = 0
            conflict = -1
            while i < len(watching):
                ci = watching[i]
                i += 1
                clause = clauses[ci]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                fv = value[abs(first)]
                if (fv if first > 0 else -fv) == 1:
                    keep.append(ci)
                    continue
                moved = False
                for k in range(2, len(clause)):
                    lit = clause[k]
                    lv = value[abs(lit)]
                    if (lv if lit > 0 else -lv) != -1:
                        clause[1], clause[k] = lit, false_lit
                        self.watches.setdefault(lit, []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                if fv == 0:
                    self._assign(first, ci)
                else:
                    conflict = ci
                    keep.extend(watching[i:])
                    break
            self.watches[false_lit] = keep
            if conflict >= 0:
                return head, conflict
        return head, -1

    def _analyze(self, conflict: int) -> tuple[list[int], int]:
        """First-UIP learned clause (asserting literal first) and its backjump level."""
        current = len(self.trail_lim)
        seen = [False] * (self.n + 1)
        learned: list[int] = []
        pending = 0
        lit = 0
        idx = len(self.trail) - 1
        clause = self.clauses[conflict]
        while True:
            for q in clause:
                if q == lit:
                    continue
                var = abs(q)
                if seen[var] or self.level[var] == 0:
                    continue
                seen[var] = True
                if self.level[var] == current:
                    pending += 1
                else:
                    learned.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            lit = self.trail[idx]
            idx -= 1
            pending -= 1
            if pending == 0:
                break
            clause = self.clauses[self.reason[abs(lit)]]
        learned.insert(0, -lit)
        if len(learned) == 1:
            return learned, 0
        # second watch goes on the literal assigned at the highest remaining level
        best = max(range(1, len(learned)), key=lambda i: self.level[abs(learned[i])])
        learned[1], learned[best] = learned[best], learned[1]
        return learned, self.level[abs(learned[1])]

    def _backjump(self, level: int) -> int:
        if len(self.trail_lim) <= level:
            return len(self.trail)
        mark = self.trail_lim[level]
        for lit in self.trail[mark:]:
            var = abs(lit)
            self.value[var] = 0
            self.reason[var] = -1
            if var < self._next:
                self._next = var
        del self.trail[mark:]
        del self.trail_lim[level:]
        return mark

    def solve(self) -> dict[int, bool] | None:
        """A satisfying total assignment, or ``None`` when unsatisfiable."""
        if self.empty:
            return None
        for lit in self.units:
            v = self._lit_value(lit)
            if v == -1:
                return None
            if v == 0:
                self._assign(lit, -1)
        head, conflict = self._propagate(0)
        if conflict >= 0:
            return None
        self._next = 1
        while True:
            while self._next <= self.n and self.value[self._next] != 0:
                self._next += 1
            if self._next > self.n:
                return {v: self.value[v] == 1 for v in range(1, self.n + 1)}
            self.decisions += 1
            if self.decisions & 0xFF == 0:
                self.deadline.check()
            self.trail_lim.append(len(self.trail))
            self._assign(self._next, -1)
            head, conflict = self._propagate(head)
            while conflict >= 0:
                self.conflicts += 1
                if not self.trail_lim:
                    return None
                learned, level = self._analyze(conflict)
                head = self._backjump(level)
                if len(learned) == 1:
                    self._assign(learned[0], -1)
                else:
                    self._assign(learned[0], self._attach(learned))
                    self.learned += 1
                head, conflict = self._propagate(head)


def solve_cnf(num_vars: int, clauses: Iterable[Sequence[int]], deadline: Deadline = NO_DEADLINE) -> dict[int, bool] | None:
    return Dpll(num_vars, clauses, deadline).solve()
