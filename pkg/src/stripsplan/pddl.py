"""Tokenizer and parser for the STRIPS + typing fragment of PDDL.

Only the constructs needed for classical STRIPS planning are accepted:
``define domain/problem``, ``:requirements`` (``:strips`` and ``:typing``),
``:types``, ``:predicates``, ``:action`` with conjunctive positive
preconditions and conjunctive literal effects, ``:objects``, ``:init`` and
``:goal``.  Anything else is rejected with :class:`UnsupportedFeature`.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, Union

ROOT_TYPE = "object"
SUPPORTED_REQUIREMENTS = frozenset({":strips", ":typing"})
_ADL_HEADS = frozenset({"or", "not", "imply", "forall", "exists", "when", "either", "="})


class Position(NamedTuple):
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class PddlError(Exception):
    """Base class for every front-end error; always carries a position."""

    def __init__(self, message: str, position: Position | None = None):
        self.position = position
        where = f" at {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class IllegalCharacter(PddlError):
    pass


class PddlSyntaxError(PddlError):
    def __init__(self, expected: str, position: Position | None, found: str | None = None):
        self.expected = expected
        msg = f"expected {expected}"
        if found is not None:
            msg += f", found {found!r}"
        super().__init__(msg, position)


class UndeclaredPredicate(PddlError):
    pass


class ArityMismatch(PddlError):
    pass


class UnknownObjectInAtom(PddlError):
    pass


class UnsupportedFeature(PddlError):
    pass


class UnboundVariable(PddlError):
    pass


class TypeCycle(PddlError):
    pass


# --------------------------------------------------------------------------
# Tokens

LPAREN, RPAREN, KW, IDENT, VAR, DASH = "LPAREN", "RPAREN", "KW", "IDENT", "VAR", "DASH"


class Token(NamedTuple):
    kind: str
    value: str | None
    position: Position

    def __repr__(self) -> str:
        return self.kind if self.value is None else f"{self.kind}({self.value})"


def _is_name_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_" or unicodedata.category(ch).startswith("L")


def _is_name_char(ch: str) -> bool:
    return ch.isalnum() or ch in "-_." or unicodedata.category(ch)[0] in "LMN"


def tokenize(text: str) -> list[Token]:
    """Split PDDL text into tokens; comments are dropped and names lower-cased.

    >>> tokenize("(:action carregar")
    [LPAREN, KW(action), IDENT(carregar)]
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    line, col = 1, 1

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        pos = Position(line, col)
        if ch.isspace():
            advance(1)
        elif ch == ";":
            while i < n and text[i] != "\n":
                advance(1)
        elif ch == "(":
            tokens.append(Token(LPAREN, None, pos))
            advance(1)
        elif ch == ")":
            tokens.append(Token(RPAREN, None, pos))
            advance(1)
        elif ch in ":?":
            j = i + 1
            if j >= n or not _is_name_start(text[j]):
                raise IllegalCharacter(f"illegal character {ch!r}", pos)
            while j < n and _is_name_char(text[j]):
                j += 1
            kind = KW if ch == ":" else VAR
            tokens.append(Token(kind, text[i + 1:j].lower(), pos))
            advance(j - i)
        elif ch == "-" and (i + 1 >= n or not _is_name_char(text[i + 1])):
            tokens.append(Token(DASH, None, pos))
            advance(1)
        elif _is_name_start(ch):
            j = i + 1
            while j < n and _is_name_char(text[j]):
                j += 1
            tokens.append(Token(IDENT, text[i:j].lower(), pos))
            advance(j - i)
        else:
            raise IllegalCharacter(f"illegal character {ch!r}", pos)
    return tokens


# --------------------------------------------------------------------------
# S-expressions


@dataclass
class SList:
    items: list[Union[Token, "SList"]]
    position: Position

    def head(self) -> Token | None:
        if self.items and isinstance(self.items[0], Token):
            return self.items[0]
        return None


SExpr = Union[Token, SList]


def read_sexpr(text: str) -> SList:
    """Read exactly one parenthesised expression from ``text``."""
    tokens = tokenize(text)
    if not tokens:
        raise PddlSyntaxError("'('", Position(1, 1), "end of input")
    stack: list[SList] = []
    result: SList | None = None
    for tok in tokens:
        if result is not None:
            raise PddlSyntaxError("end of input", tok.position, _describe(tok))
        if tok.kind == LPAREN:
            stack.append(SList([], tok.position))
        elif tok.kind == RPAREN:
            if not stack:
                raise PddlSyntaxError("'('", tok.position, ")")
            done = stack.pop()
            if stack:
                stack[-1].items.append(done)
            else:
                result = done
        else:
            if not stack:
                raise PddlSyntaxError("'('", tok.position, _describe(tok))
            stack[-1].items.append(tok)
    if stack:
        raise PddlSyntaxError("')'", stack[-1].position, "end of input")
    assert result is not None
    return result


def _describe(node: SExpr) -> str:
    if isinstance(node, SList):
        return "(...)"
    if node.kind == KW:
        return ":" + (node.value or "")
    if node.kind == VAR:
        return "?" + (node.value or "")
    if node.kind == DASH:
        return "-"
    return node.value or node.kind


def _pos(node: SExpr) -> Position:
    return node.position


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...]  # variables keep their leading '?'

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate,) + self.args) + ")"


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    parameters: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple[tuple[str, str], ...]
    precondition: tuple[Atom, ...]
    add_effects: tuple[Atom, ...]
    del_effects: tuple[Atom, ...]


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: tuple[str, ...]
    types: tuple[tuple[str, str], ...]
    predicates: tuple[PredicateDecl, ...]
    actions: tuple[ActionSchema, ...]

    def predicate(self, name: str) -> PredicateDecl | None:
        for decl in self.predicates:
            if decl.name == name:
                return decl
        return None

    def type_parents(self) -> dict[str, str]:
        """Map every known type (declared or only used as a parent) to its parent."""
        parents: dict[str, str] = {}
        for name, parent in self.types:
            parents[name] = parent
        for _, parent in self.types:
            if parent != ROOT_TYPE:
                parents.setdefault(parent, ROOT_TYPE)
        parents.pop(ROOT_TYPE, None)
        return parents


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]
    init: tuple[Atom, ...]
    goal: tuple[Atom, ...]


# --------------------------------------------------------------------------
# Parser helpers


def _expect_list(node: SExpr, what: str) -> SList:
    if not isinstance(node, SList):
        raise PddlSyntaxError(what, _pos(node), _describe(node))
    return node


def _expect_token(node: SExpr, kind: str, what: str, value: str | None = None) -> Token:
    if not isinstance(node, Token) or node.kind != kind or (value is not None and node.value != value):
        raise PddlSyntaxError(what, _pos(node), _describe(node))
    return node


def _parse_typed_list(items: list[SExpr], element_kind: str, what: str) -> list[tuple[str, str, Position]]:
    """Parse ``a b - t c - u d`` into (name, type) pairs; untyped names get ``object``."""
    out: list[tuple[str, str, Position]] = []
    pending: list[Token] = []
    i = 0
    while i < len(items):
        node = items[i]
        if isinstance(node, Token) and node.kind == DASH:
            if not pending:
                raise PddlSyntaxError(what, node.position, "-")
            if i + 1 >= len(items):
                raise PddlSyntaxError("type name", node.position, "end of list")
            typ = items[i + 1]
            if isinstance(typ, SList):
                head = typ.head()
                if head is not None and head.value == "either":
                    raise UnsupportedFeature("'either' types are not supported", typ.position)
                raise PddlSyntaxError("type name", typ.position, "(...)")
            _expect_token(typ, IDENT, "type name")
            for tok in pending:
                out.append((tok.value, typ.value, tok.position))
            pending = []
            i += 2
            continue
        tok = _expect_token(node, element_kind, what)
        pending.append(tok)
        i += 1
    for tok in pending:
        out.append((tok.value, ROOT_TYPE, tok.position))
    return out


def _parse_atom(node: SExpr, allow_vars: bool) -> tuple[Atom, Position]:
    lst = _expect_list(node, "atom")
    if not lst.items:
        raise PddlSyntaxError("predicate name", lst.position, "()")
    head = lst.items[0]
    if isinstance(head, Token) and head.kind == IDENT and head.value in _ADL_HEADS:
        raise UnsupportedFeature(f"'{head.value}' is outside the STRIPS fragment", lst.position)
    pred = _expect_token(head, IDENT, "predicate name")
    args: list[str] = []
    for arg in lst.items[1:]:
        if isinstance(arg, Token) and arg.kind == VAR and allow_vars:
            args.append("?" + arg.value)
        elif isinstance(arg, Token) and arg.kind == IDENT:
            args.append(arg.value)
        else:
            raise PddlSyntaxError("object name" if not allow_vars else "term", _pos(arg), _describe(arg))
    return Atom(pred.value, tuple(args)), lst.position


def _conjuncts(node: SExpr) -> list[SExpr]:
    """Flatten an optional ``(and ...)`` wrapper; ``()`` is the empty conjunction."""
    lst = _expect_list(node, "formula")
    if not lst.items:
        return []
    head = lst.head()
    if head is not None and head.kind == IDENT and head.value == "and":
        return list(lst.items[1:])
    return [lst]


def _parse_condition(node: SExpr, allow_vars: bool) -> list[tuple[Atom, Position]]:
    out = []
    for item in _conjuncts(node):
        out.append(_parse_atom(item, allow_vars))
    return out


def _parse_effect(node: SExpr) -> tuple[list[tuple[Atom, Position]], list[tuple[Atom, Position]]]:
    adds, dels = [], []
    for item in _conjuncts(node):
        lst = _expect_list(item, "effect literal")
        head = lst.head()
        if head is not None and head.kind == IDENT and head.value == "not":
            if len(lst.items) != 2:
                raise PddlSyntaxError("single atom inside 'not'", lst.position)
            dels.append(_parse_atom(lst.items[1], True))
        else:
            adds.append(_parse_atom(lst, True))
    return adds, dels


def _split_define(text: str, kind: str) -> tuple[str, list[SExpr], SList]:
    root = read_sexpr(text)
    if len(root.items) < 2:
        raise PddlSyntaxError(f"(define ({kind} ...) ...)", root.position)
    _expect_token(root.items[0], IDENT, "'define'", "define")
    header = _expect_list(root.items[1], f"({kind} <name>)")
    if len(header.items) != 2:
        raise PddlSyntaxError(f"({kind} <name>)", header.position)
    _expect_token(header.items[0], IDENT, f"'{kind}'", kind)
    name = _expect_token(header.items[1], IDENT, f"{kind} name").value
    return name, root.items[2:], root


# --------------------------------------------------------------------------
# Domain


def _check_types(pairs: list[tuple[str, str, Position]]) -> tuple[tuple[str, str], ...]:
    parents: dict[str, str] = {}
    where: dict[str, Position] = {}
    for name, parent, pos in pairs:
        if name == ROOT_TYPE:
            if parent != ROOT_TYPE:
                raise TypeCycle("the root type 'object' cannot have a parent", pos)
            continue
        parents[name] = parent
        where[name] = pos
    for start in parents:
        seen = {start}
        cur = parents[start]
        while cur != ROOT_TYPE and cur in parents:
            if cur in seen:
                raise TypeCycle(f"type hierarchy cycle through {start!r}", where[start])
            seen.add(cur)
            cur = parents[cur]
    return tuple((name, parent) for name, parent, _ in pairs if name != ROOT_TYPE)


def parse_domain(text: str) -> DomainAst:
    name, sections, _ = _split_define(text, "domain")
    requirements: list[str] = []
    type_pairs: list[tuple[str, str, Position]] = []
    predicates: list[PredicateDecl] = []
    pred_pos: dict[str, Position] = {}
    raw_actions: list[tuple[SList, Token]] = []

    for sec in sections:
        lst = _expect_list(sec, "domain section")
        head = lst.items[0] if lst.items else None
        if head is None:
            raise PddlSyntaxError("section keyword", lst.position, "()")
        kw = _expect_token(head, KW, "section keyword")
        if kw.value == "requirements":
            for req in lst.items[1:]:
                tok = _expect_token(req, KW, "requirement keyword")
                flag = ":" + tok.value
                if flag not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeature(f"requirement {flag} is not supported", tok.position)
                requirements.append(flag)
        elif kw.value == "types":
            type_pairs.extend(_parse_typed_list(lst.items[1:], IDENT, "type name"))
        elif kw.value == "predicates":
            for decl in lst.items[1:]:
                dl = _expect_list(decl, "predicate declaration")
                if not dl.items:
                    raise PddlSyntaxError("predicate name", dl.position, "()")
                pname = _expect_token(dl.items[0], IDENT, "predicate name")
                params = _parse_typed_list(dl.items[1:], VAR, "parameter variable")
                predicates.append(PredicateDecl(pname.value, tuple(("?" + v, t) for v, t, _ in params)))
                pred_pos[pname.value] = dl.position
        elif kw.value == "action":
            if len(lst.items) < 2:
                raise PddlSyntaxError("action name", lst.position)
            raw_actions.append((lst, _expect_token(lst.items[1], IDENT, "action name")))
        else:
            raise UnsupportedFeature(f"section :{kw.value} is not supported", kw.position)

    types = _check_types(type_pairs)
    known_types = {ROOT_TYPE} | {n for n, _ in types} | {p for _, p in types}
    decls = {p.name: p for p in predicates}
    for decl in predicates:
        for _, t in decl.parameters:
            if t not in known_types:
                raise PddlSyntaxError(f"declared type (got {t!r})", pred_pos[decl.name])

    actions = [
        _parse_action(lst, name_tok.value, decls, known_types) for lst, name_tok in raw_actions
    ]
    return DomainAst(name, tuple(requirements), types, tuple(predicates), tuple(actions))


def _check_atom(atom: Atom, pos: Position, decls: dict[str, PredicateDecl]) -> None:
    decl = decls.get(atom.predicate)
    if decl is None:
        raise UndeclaredPredicate(f"predicate {atom.predicate!r} is not declared", pos)
    if len(decl.parameters) != len(atom.args):
        raise ArityMismatch(
            f"{atom} has {len(atom.args)} arguments, {atom.predicate} takes {len(decl.parameters)}", pos
        )


def _parse_action(lst: SList, name: str, decls: dict[str, PredicateDecl], known_types: set[str]) -> ActionSchema:
    fields: dict[str, SExpr] = {}
    items = lst.items[2:]
    if len(items) % 2:
        raise PddlSyntaxError("keyword/value pairs in action body", lst.position)
    for key, value in zip(items[0::2], items[1::2]):
        kw = _expect_token(key, KW, "action keyword")
        if kw.value not in ("parameters", "precondition", "effect"):
            raise UnsupportedFeature(f"action field :{kw.value} is not supported", kw.position)
        fields[kw.value] = value

    params: list[tuple[str, str]] = []
    if "parameters" in fields:
        plist = _expect_list(fields["parameters"], "parameter list")
        for var, typ, pos in _parse_typed_list(plist.items, VAR, "parameter variable"):
            if typ not in known_types:
                raise PddlSyntaxError(f"declared type (got {typ!r})", pos)
            params.append(("?" + var, typ))
    bound = {v for v, _ in params}

    pre = _parse_condition(fields["precondition"], True) if "precondition" in fields else []
    adds, dels = _parse_effect(fields["effect"]) if "effect" in fields else ([], [])
    for atom, pos in pre + adds + dels:
        _check_atom(atom, pos, decls)
        for arg in atom.args:
            if arg.startswith("?") and arg not in bound:
                raise UnboundVariable(f"variable {arg} in {name} is not a parameter", pos)
    return ActionSchema(
        name,
        tuple(params),
        tuple(a for a, _ in pre),
        tuple(a for a, _ in adds),
        tuple(a for a, _ in dels),
    )


# --------------------------------------------------------------------------
# Problem


def parse_problem(text: str) -> ProblemAst:
    name, sections, root = _split_define(text, "problem")
    domain_name: str | None = None
    objects: list[tuple[str, str, Position]] = []
    init: list[tuple[Atom, Position]] = []
    goal: list[tuple[Atom, Position]] = []
    for sec in sections:
        lst = _expect_list(sec, "problem section")
        if not lst.items:
            raise PddlSyntaxError("section keyword", lst.position, "()")
        kw = _expect_token(lst.items[0], KW, "section keyword")
        if kw.value == "domain":
            if len(lst.items) != 2:
                raise PddlSyntaxError("(:domain <name>)", lst.position)
            domain_name = _expect_token(lst.items[1], IDENT, "domain name").value
        elif kw.value == "requirements":
            for req in lst.items[1:]:
                tok = _expect_token(req, KW, "requirement keyword")
                if ":" + tok.value not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeature(f"requirement :{tok.value} is not supported", tok.position)
        elif kw.value == "objects":
            objects.extend(_parse_typed_list(lst.items[1:], IDENT, "object name"))
        elif kw.value == "init":
            init.extend(_parse_atom(item, False) for item in lst.items[1:])
        elif kw.value == "goal":
            if len(lst.items) != 2:
                raise PddlSyntaxError("single goal formula", lst.position)
            goal.extend(_parse_condition(lst.items[1], False))
        else:
            raise UnsupportedFeature(f"section :{kw.value} is not supported", kw.position)
    if domain_name is None:
        raise PddlSyntaxError("(:domain <name>)", root.position)

    declared = {o for o, _, _ in objects}
    for atom, pos in init + goal:
        for arg in atom.args:
            if arg not in declared:
                raise UnknownObjectInAtom(f"object {arg!r} in {atom} is not declared", pos)
    return ProblemAst(
        name,
        domain_name,
        tuple((o, t) for o, t, _ in objects),
        tuple(_dedupe(a for a, _ in init)),
        tuple(_dedupe(a for a, _ in goal)),
    )


def _dedupe(atoms: Iterator[Atom]) -> list[Atom]:
    seen: dict[Atom, None] = {}
    for atom in atoms:
        seen.setdefault(atom, None)
    return list(seen)


def load_domain(path: str | Path) -> DomainAst:
    return parse_domain(Path(path).read_text(encoding="utf-8"))


def load_problem(path: str | Path) -> ProblemAst:
    return parse_problem(Path(path).read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# Pretty printing


def _typed(pairs: tuple[tuple[str, str], ...]) -> str:
    parts: list[str] = []
    i = 0
    while i < len(pairs):
        typ = pairs[i][1]
        group = []
        while i < len(pairs) and pairs[i][1] == typ:
            group.append(pairs[i][0])
            i += 1
        parts.append(" ".join(group) + f" - {typ}")
    return " ".join(parts)


def _conj(atoms: tuple[str, ...]) -> str:
    return "(and " + " ".join(atoms) + ")" if atoms else "()"


def format_domain(dom: DomainAst) -> str:
    lines = [f"(define (domain {dom.name})"]
    if dom.requirements:
        lines.append("  (:requirements " + " ".join(dom.requirements) + ")")
    if dom.types:
        lines.append("  (:types " + _typed(dom.types) + ")")
    lines.append("  (:predicates")
    for p in dom.predicates:
        body = " ".join([p.name] + ([_typed(p.parameters)] if p.parameters else []))
        lines.append(f"    ({body})")
    lines[-1] += ")"
    for act in dom.actions:
        lines.append(f"  (:action {act.name}")
        lines.append(f"    :parameters ({_typed(act.parameters)})")
        lines.append(f"    :precondition {_conj(tuple(str(a) for a in act.precondition))}")
        effects = tuple(str(a) for a in act.add_effects) + tuple(f"(not {a})" for a in act.del_effects)
        lines.append(f"    :effect {_conj(effects)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def format_problem(prob: ProblemAst) -> str:
    lines = [f"(define (problem {prob.name})", f"  (:domain {prob.domain_name})"]
    lines.append("  (:objects " + _typed(prob.objects) + ")")
    lines.append("  (:init " + " ".join(str(a) for a in prob.init) + ")")
    lines.append("  (:goal " + _conj(tuple(str(a) for a in prob.goal)) + "))")
    return "\n".join(lines) + "\n"
