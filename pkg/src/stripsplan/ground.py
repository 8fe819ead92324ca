"""Grounding: instantiate typed schemas into an indexed propositional problem."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable

from .pddl import (
    ROOT_TYPE,
    ArityMismatch,
    Atom,
    DomainAst,
    PddlError,
    ProblemAst,
    UndeclaredPredicate,
)


class GroundingError(PddlError):
    pass


class TypeMismatch(GroundingError):
    pass


class GoalAtomUngroundable(GroundingError):
    pass


class DomainMismatch(GroundingError):
    pass


class PreconditionUnsatisfied(Exception):
    def __init__(self, action: "GroundAction", missing: frozenset[int]):
        self.action = action
        self.missing = missing
        super().__init__(f"action {action.id} is missing preconditions {sorted(missing)}")


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in ascending order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class SymbolTable:
    prop_names: tuple[str, ...]
    action_names: tuple[str, ...]

    @cached_property
    def prop_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.prop_names)}

    @cached_property
    def action_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.action_names)}


@dataclass(frozen=True)
class GroundAction:
    id: int
    pre: frozenset[int]
    add: frozenset[int]
    dele: frozenset[int]
    pre_mask: int = field(init=False, repr=False, compare=False)
    add_mask: int = field(init=False, repr=False, compare=False)
    del_mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pre_mask", mask_of(self.pre))
        object.__setattr__(self, "add_mask", mask_of(self.add))
        object.__setattr__(self, "del_mask", mask_of(self.dele))


@dataclass(frozen=True)
class GroundedProblem:
    actions: tuple[GroundAction, ...]
    init: frozenset[int]
    goal: frozenset[int]
    symbols: SymbolTable
    name: str = "problem"
    domain_name: str = "domain"
    relaxed: bool = False

    @property
    def prop_count(self) -> int:
        return len(self.symbols.prop_names)

    @property
    def action_count(self) -> int:
        return len(self.actions)

    def prop_name(self, i: int) -> str:
        return self.symbols.prop_names[i]

    def action_name(self, i: int) -> str:
        return self.symbols.action_names[i]

    @cached_property
    def producers(self) -> tuple[tuple[int, ...], ...]:
        """For each proposition, the ids of actions adding it (ascending)."""
        table: list[list[int]] = [[] for _ in range(self.prop_count)]
        for a in self.actions:
            for p in a.add:
                table[p].append(a.id)
        return tuple(tuple(t) for t in table)

    @cached_property
    def init_mask(self) -> int:
        return mask_of(self.init)

    @cached_property
    def goal_mask(self) -> int:
        return mask_of(self.goal)

    def applicable(self, state: frozenset[int]) -> list[GroundAction]:
        return [a for a in self.actions if a.pre <= state]


def _ancestors(domain: DomainAst) -> dict[str, frozenset[str]]:
    parents = domain.type_parents()
    out: dict[str, frozenset[str]] = {ROOT_TYPE: frozenset({ROOT_TYPE})}
    for t in parents:
        chain = {t, ROOT_TYPE}
        cur = t
        while cur in parents:
            cur = parents[cur]
            chain.add(cur)
        out[t] = frozenset(chain)
    return out


def atom_text(predicate: str, args: Iterable[str]) -> str:
    return "(" + " ".join((predicate, *args)) + ")"


def ground(domain: DomainAst, problem: ProblemAst) -> GroundedProblem:
    """Instantiate every schema with every type-compatible object tuple.

    Propositions are enumerated per predicate in declaration order over the
    cartesian product of compatible objects; actions likewise per schema.
    Instances whose preconditions name a type-inconsistent atom can never
    fire and are dropped.
    """
    if problem.domain_name != domain.name:
        raise DomainMismatch(f"problem targets domain {problem.domain_name!r}, loaded {domain.name!r}")

    ancestors = _ancestors(domain)
    for obj, typ in problem.objects:
        if typ not in ancestors:
            raise TypeMismatch(f"object {obj!r} has undeclared type {typ!r}")

    def objects_of(typ: str) -> list[str]:
        return [o for o, t in problem.objects if typ in ancestors[t]]

    obj_type = dict(problem.objects)
    prop_names: list[str] = []
    prop_index: dict[str, int] = {}
    for decl in domain.predicates:
        pools = [objects_of(t) for _, t in decl.parameters]
        for combo in itertools.product(*pools):
            name = atom_text(decl.name, combo)
            prop_index[name] = len(prop_names)
            prop_names.append(name)

    action_names: list[str] = []
    actions: list[GroundAction] = []
    for schema in domain.actions:
        variables = [v for v, _ in schema.parameters]
        pools = [objects_of(t) for _, t in schema.parameters]
        for combo in itertools.product(*pools):
            binding = dict(zip(variables, combo))

            def resolve(atoms: tuple[Atom, ...]) -> list[int | None]:
                return [
                    prop_index.get(atom_text(a.predicate, (binding.get(x, x) for x in a.args)))
                    for a in atoms
                ]

            pre = resolve(schema.precondition)
            if None in pre:
                continue
            add = resolve(schema.add_effects)
            if None in add:
                raise TypeMismatch(
                    f"effect of {schema.name}{combo} is not a type-consistent atom"
                )
            dele = [i for i in resolve(schema.del_effects) if i is not None]
            action_names.append(atom_text(schema.name, combo))
            actions.append(GroundAction(len(actions), frozenset(pre), frozenset(add), frozenset(dele)))

    decls = {d.name: d for d in domain.predicates}

    def lookup(atom: Atom, error: type[GroundingError]) -> int:
        decl = decls.get(atom.predicate)
        if decl is None:
            raise UndeclaredPredicate(f"predicate {atom.predicate!r} is not declared")
        if len(decl.parameters) != len(atom.args):
            raise ArityMismatch(f"{atom} does not match the arity of {atom.predicate}")
        idx = prop_index.get(atom_text(atom.predicate, atom.args))
        if idx is None:
            kinds = ", ".join(f"{o}:{obj_type.get(o)}" for o in atom.args)
            raise error(f"{atom} is not type-consistent ({kinds})")
        return idx

    init = frozenset(lookup(a, TypeMismatch) for a in problem.init)
    goal = frozenset(lookup(a, GoalAtomUngroundable) for a in problem.goal)
    return GroundedProblem(
        actions=tuple(actions),
        init=init,
        goal=goal,
        symbols=SymbolTable(tuple(prop_names), tuple(action_names)),
        name=problem.name,
        domain_name=domain.name,
    )


def relax(p: GroundedProblem) -> GroundedProblem:
    """Drop every delete list; the symbol table is shared."""
    if p.relaxed:
        return p
    actions = tuple(GroundAction(a.id, a.pre, a.add, frozenset()) for a in p.actions)
    return replace(p, actions=actions, relaxed=True)


def apply(state: frozenset[int], a: GroundAction) -> frozenset[int]:
    missing = a.pre - state
    if missing:
        raise PreconditionUnsatisfied(a, frozenset(missing))
    return (state - a.dele) | a.add


def dump_ground(p: GroundedProblem) -> str:
    """Text dump: one line per action, then one line per proposition."""
    lines = []
    for a in p.actions:
        fmt = lambda s: ",".join(str(i) for i in sorted(s))  # noqa: E731
        lines.append(f"{a.id}: {p.action_name(a.id)}(pre=[{fmt(a.pre)}] add=[{fmt(a.add)}] del=[{fmt(a.dele)}])")
    for i, name in enumerate(p.symbols.prop_names):
        lines.append(f"{i}: {name}")
    return "\n".join(lines) + "\n"
