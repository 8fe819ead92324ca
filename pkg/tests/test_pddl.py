from __future__ import annotations

import pytest

from stripsplan.pddl import (
    ArityMismatch,
    DASH,
    IDENT,
    KW,
    LPAREN,
    RPAREN,
    VAR,
    IllegalCharacter,
    PddlError,
    PddlSyntaxError,
    TypeCycle,
    UnboundVariable,
    UndeclaredPredicate,
    UnknownObjectInAtom,
    UnsupportedFeature,
    format_domain,
    format_problem,
    load_domain,
    load_problem,
    parse_domain,
    parse_problem,
    tokenize,
)
from stripsplan.suite import bundled

from oracles import fixture_path


def kinds(text):
    return [(t.kind, t.value) for t in tokenize(text)]


def test_tokenize_action_header():
    assert kinds("(:action carregar") == [(LPAREN, None), (KW, "action"), (IDENT, "carregar")]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_typed_variable():
    assert kinds("?pkg - pacote") == [(VAR, "pkg"), (DASH, None), (IDENT, "pacote")]


def test_tokenize_strips_comments_and_lowercases():
    assert kinds("; header\n(Em ?X) ; tail") == [(LPAREN, None), (IDENT, "em"), (VAR, "x"), (RPAREN, None)]


def test_tokenize_keeps_hyphenated_names_and_unicode():
    assert kinds("loc-from caminhão") == [(IDENT, "loc-from"), (IDENT, "caminhão")]


def test_tokenize_positions():
    toks = tokenize("(a\n  b)")
    assert [tuple(t.position) for t in toks] == [(1, 1), (1, 2), (2, 3), (2, 4)]


def test_illegal_character_has_position():
    with pytest.raises(IllegalCharacter) as err:
        tokenize("(a\n #)")
    assert tuple(err.value.position) == (2, 2)


def test_comerciante_domain():
    dom = load_domain(fixture_path("comerciante", "domain.pddl"))
    assert [a.name for a in dom.actions] == ["carregar", "descarregar", "dirigir"]
    assert [p.name for p in dom.predicates] == ["em", "dentro"]
    carregar = dom.actions[0]
    assert [str(a) for a in carregar.precondition] == ["(em ?truck ?loc)", "(em ?pkg ?loc)"]
    assert [str(a) for a in carregar.del_effects] == ["(em ?pkg ?loc)"]
    assert [str(a) for a in carregar.add_effects] == ["(dentro ?pkg ?truck)"]


def test_type_hierarchy_parents():
    dom = load_domain(fixture_path("comerciante", "domain.pddl"))
    parents = dom.type_parents()
    assert parents["caminhão"] == "veículo"
    assert parents["veículo"] == "objeto"
    assert parents["objeto"] == "geral"
    assert parents["pacote"] == "objeto"  # typed lists group names before the dash
    assert parents["localidade"] == "geral"


def test_jantar_domain():
    dom = load_domain(fixture_path("jantar", "domain.pddl"))
    acts = {a.name: a for a in dom.actions}
    assert set(acts) == {"cozinhar", "embrulhar"}
    assert [str(a) for a in acts["cozinhar"].precondition] == ["(mãoslimpas)"]
    assert [str(a) for a in acts["cozinhar"].del_effects] == ["(silêncio)"]
    assert [str(a) for a in acts["embrulhar"].precondition] == ["(silêncio)"]


def test_zero_action_domain():
    dom = parse_domain("(define (domain empty) (:predicates (p)))")
    assert dom.actions == ()


def test_sections_in_any_order():
    dom = parse_domain(
        "(define (domain d) (:predicates (at ?x - thing)) (:types thing)"
        " (:action go :parameters (?x - thing) :precondition (at ?x) :effect (not (at ?x))))"
    )
    assert dom.actions[0].parameters == (("?x", "thing"),)


def test_untyped_parameters_default_to_object():
    dom = parse_domain("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :precondition (p ?x) :effect (p ?x)))")
    assert dom.actions[0].parameters == (("?x", "object"),)
    assert dom.predicates[0].parameters == (("?x", "object"),)


def test_comerciante_problem_deduplicates_goal():
    prob = load_problem(fixture_path("comerciante", "comerciante-1.pddl"))
    # pacote1 pacote2 caminhão1 loja1 loja2 depósito
    assert [o for o, _ in prob.objects] == ["pacote1", "pacote2", "caminhão1", "loja1", "loja2", "depósito"]
    assert [str(a) for a in prob.init] == ["(em caminhão1 depósito)", "(em pacote1 loja1)", "(em pacote2 loja1)"]
    assert [str(a) for a in prob.goal] == ["(em pacote2 loja2)"]


def test_jantar_problem():
    prob = load_problem(fixture_path("jantar", "jantar.pddl"))
    assert {str(a) for a in prob.init} == {"(mãoslimpas)", "(silêncio)"}
    assert {str(a) for a in prob.goal} == {"(jantar)", "(presenteembrulhado)"}


def test_goal_equal_to_init_is_valid():
    prob = parse_problem("(define (problem p) (:domain d) (:objects a) (:init (q a)) (:goal (q a)))")
    assert prob.init == prob.goal


@pytest.mark.parametrize(
    "text, error",
    [
        ("(define (domain d) (:predicates (p)) (:action a :parameters () :precondition (r) :effect (p)))", UndeclaredPredicate),
        ("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :precondition (p) :effect (p ?x)))", ArityMismatch),
        ("(define (domain d) (:predicates (p ?x)) (:action a :parameters () :precondition (p ?y) :effect (p ?y)))", UnboundVariable),
        ("(define (domain d) (:requirements :adl) (:predicates (p)))", UnsupportedFeature),
        ("(define (domain d) (:predicates (p)) (:action a :parameters () :precondition (or (p) (p)) :effect (p)))", UnsupportedFeature),
        ("(define (domain d) (:predicates (p)) (:action a :parameters () :precondition (not (p)) :effect (p)))", UnsupportedFeature),
        ("(define (domain d) (:types a - b b - a) (:predicates (p)))", TypeCycle),
        ("(define (domain d) (:predicates (p))", PddlSyntaxError),
        ("(define (domain d) (:predicates (p))) (extra)", PddlSyntaxError),
    ],
)
def test_domain_errors(text, error):
    with pytest.raises(error) as err:
        parse_domain(text)
    assert isinstance(err.value, PddlError)


def test_unknown_object_in_problem():
    with pytest.raises(UnknownObjectInAtom) as err:
        parse_problem("(define (problem p) (:domain d) (:objects a) (:init (q b)) (:goal (q a)))")
    assert err.value.position is not None


def test_syntax_errors_carry_positions():
    with pytest.raises(PddlSyntaxError) as err:
        parse_problem("(define (problem p) (:domain d)\n  (:init (q a)) (:goal))")
    assert err.value.position is not None


@pytest.mark.parametrize("inst", bundled(), ids=lambda i: i.name)
def test_fixture_round_trip(inst):
    dom = load_domain(inst.domain)
    prob = load_problem(inst.problem)
    assert parse_domain(format_domain(dom)) == dom
    assert parse_problem(format_problem(prob)) == prob
