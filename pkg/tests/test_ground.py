from __future__ import annotations

import math
import random

import pytest

from stripsplan.ground import (
    DomainMismatch,
    GoalAtomUngroundable,
    GroundAction,
    PreconditionUnsatisfied,
    TypeMismatch,
    apply,
    dump_ground,
    ground,
    relax,
)
from stripsplan.pddl import load_domain, parse_domain, parse_problem
from stripsplan.suite import bundled

from oracles import load, load_instance, prop_named, random_problem


def names(p, prefix):
    return [n for n in p.symbols.action_names if n.startswith(prefix)]


def test_carregar_instances_comerciante():
    p = load("comerciante-1")
    # 2 pacotes x 1 caminhão x 3 localidades
    assert len(names(p, "(carregar ")) == 6
    assert "(carregar pacote1 caminhão1 loja1)" in p.symbols.action_names


def test_dirigir_includes_self_loops():
    p = load("comerciante-1")
    dirigir = names(p, "(dirigir ")
    assert len(dirigir) == 9
    assert "(dirigir caminhão1 loja2 loja2)" in dirigir


def test_comerciante_sizes():
    p = load("comerciante-1")
    assert (p.prop_count, p.action_count) == (11, 21)


def test_zero_parameter_schema_has_one_instance():
    p = load("jantar")
    assert sorted(p.symbols.action_names) == ["(cozinhar)", "(embrulhar)"]


def test_symbol_table_is_dense_bijection():
    p = load("logistics-2")
    for table, rev in ((p.symbols.prop_names, p.symbols.prop_index), (p.symbols.action_names, p.symbols.action_index)):
        assert len(set(table)) == len(table)
        assert sorted(rev.values()) == list(range(len(table)))
        assert all(table[i] == n for n, i in rev.items())
    assert [a.id for a in p.actions] == list(range(p.action_count))


@pytest.mark.parametrize("inst", bundled(), ids=lambda i: i.name)
def test_instance_count_is_product_of_type_pools(inst):
    dom = load_domain(inst.domain)
    p = load_instance(inst)
    from stripsplan.pddl import load_problem

    prob = load_problem(inst.problem)
    parents = dom.type_parents()

    def is_sub(t, target):
        while True:
            if t == target:
                return True
            if t not in parents:
                return target == "object"
            t = parents[t]

    for schema in dom.actions:
        pools = [[o for o, t in prob.objects if is_sub(t, typ)] for _, typ in schema.parameters]
        expected = math.prod(len(pool) for pool in pools)
        got = sum(1 for n in p.symbols.action_names if n[1:-1].split(" ")[0] == schema.name)
        assert got == expected, schema.name


def test_init_and_goal_indices():
    p = load("reduzido")
    assert {p.prop_name(i) for i in p.init} == {"(em caminhão loja2)", "(em pacote loja1)"}
    assert {p.prop_name(i) for i in p.goal} == {"(em pacote loja2)"}


def test_relax_drops_deletes_and_is_idempotent():
    p = load("comerciante-1")
    r = relax(p)
    assert all(not a.dele for a in r.actions)
    assert relax(r) is r
    assert r.symbols is p.symbols
    assert [a.pre for a in r.actions] == [a.pre for a in p.actions]


def test_relaxed_jantar_actions_coexist():
    from stripsplan.plangraph import PlanGraph

    g = PlanGraph(relax(load("jantar"))).expand()
    assert g.prop_mutex[1] == {}
    assert g.action_mutex[0] == {}
    assert {n for n in g.action_layers[0] if not n.noop} == {
        type(g.action_layers[0][0])(False, 0),
        type(g.action_layers[0][0])(False, 1),
    }


def test_apply_dirigir():
    p = load("reduzido")
    a = p.actions[p.symbols.action_index["(dirigir caminhão loja2 loja1)"]]
    out = apply(p.init, a)
    assert {p.prop_name(i) for i in out} == {"(em caminhão loja1)", "(em pacote loja1)"}


def test_apply_cozinhar():
    p = load("jantar")
    a = p.actions[p.symbols.action_index["(cozinhar)"]]
    assert {p.prop_name(i) for i in apply(p.init, a)} == {"(mãoslimpas)", "(jantar)"}


def test_apply_identity_effect():
    a = GroundAction(0, frozenset(), frozenset(), frozenset())
    s = frozenset({1, 2})
    assert apply(s, a) == s


def test_apply_missing_precondition():
    p = load("jantar")
    a = p.actions[p.symbols.action_index["(embrulhar)"]]
    with pytest.raises(PreconditionUnsatisfied) as err:
        apply(frozenset(), a)
    assert err.value.missing == {prop_named(p, "(silêncio)")}


def test_apply_properties_on_random_instances():
    rng = random.Random(7)
    for _ in range(50):
        p = random_problem(rng)
        rp = relax(p)
        for a, ra in zip(p.actions, rp.actions):
            s = frozenset(rng.sample(range(p.prop_count), rng.randint(0, p.prop_count))) | a.pre
            out = apply(s, a)
            assert out <= frozenset(range(p.prop_count))
            assert s <= apply(s, ra)


def test_domain_mismatch():
    dom = parse_domain("(define (domain d) (:predicates (p)))")
    prob = parse_problem("(define (problem x) (:domain other) (:objects) (:init (p)) (:goal (p)))")
    with pytest.raises(DomainMismatch):
        ground(dom, prob)


def test_goal_atom_with_wrong_type():
    dom = parse_domain("(define (domain d) (:types a b) (:predicates (p ?x - a)))")
    prob = parse_problem("(define (problem x) (:domain d) (:objects o - b) (:init) (:goal (p o)))")
    with pytest.raises(GoalAtomUngroundable):
        ground(dom, prob)


def test_object_with_undeclared_type():
    dom = parse_domain("(define (domain d) (:types a) (:predicates (p ?x - a)))")
    prob = parse_problem("(define (problem x) (:domain d) (:objects o - zzz) (:init) (:goal (p o)))")
    with pytest.raises(TypeMismatch):
        ground(dom, prob)


def test_dump_ground_format():
    p = load("jantar")
    text = dump_ground(p)
    lines = text.splitlines()
    assert lines[0].startswith("0: (") and "pre=[" in lines[0] and "del=[" in lines[0]
    assert len(lines) == p.action_count + p.prop_count
    assert lines[p.action_count] == f"0: {p.prop_name(0)}"
