from __future__ import annotations

import itertools
import random

import pytest

from stripsplan import graphplan
from stripsplan.dpll import Dpll, solve_cnf
from stripsplan.plangraph import PlanGraph, build_until_goals
from stripsplan.report import Outcome
from stripsplan.satenc import (
    ACTION,
    NOOP,
    PROP,
    CnfFormula,
    GoalAbsent,
    VarInfo,
    decode_model,
    encode,
    expected_clause_count,
    parse_dimacs,
    parse_model,
    remove_subsumed,
    simplify,
    solve_sat,
    solve_satplan,
    to_dimacs,
)
from stripsplan.validate import validate

from oracles import load, random_problem


def grown(p, layers):
    g = PlanGraph(p)
    for _ in range(layers):
        g.expand()
    return g


def var_of(f, kind, name, layer):
    for v, info in f.var_map.items():
        if info.kind == kind and info.layer == layer and f.var_name(v) == name:
            return v
    raise KeyError((kind, name, layer))


def brute_models(n, clauses):
    for bits in itertools.product((False, True), repeat=n):
        a = {v + 1: bits[v] for v in range(n)}
        if all(any(a[abs(l)] == (l > 0) for l in c) for c in clauses):
            yield a


# -- the bundled solver --------------------------------------------------------


def test_unit_propagation_example():
    assert solve_cnf(2, [(1,), (-1, 2)]) == {1: True, 2: True}


def test_contradiction():
    assert solve_cnf(1, [(1,), (-1,)]) is None


def test_empty_formula_is_satisfiable():
    assert solve_cnf(0, []) == {}


def test_first_variable_true_first():
    # nothing forces x1, so the solver's first decision keeps it true
    model = solve_cnf(3, [(1, 2, 3)])
    assert model[1] is True


def test_solver_matches_brute_force():
    rng = random.Random(17)
    for _ in range(400):
        n = rng.randint(1, 8)
        clauses = [
            tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(rng.randint(1, 3)))
            for _ in range(rng.randint(1, 30))
        ]
        expected = next(brute_models(n, clauses), None)
        got = solve_cnf(n, clauses)
        assert (got is None) == (expected is None)
        if got is not None:
            assert all(any(got[abs(l)] == (l > 0) for l in c) for c in clauses)


def test_solver_counters():
    s = Dpll(3, [(3, 1, 2), (3, -1, 2), (3, 1, -2), (3, -1, -2), (-3,)])
    assert s.solve() is None
    assert s.conflicts >= 1


# -- encoding ---------------------------------------------------------------


def test_goal_absent():
    with pytest.raises(GoalAbsent):
        encode(grown(load("reduzido"), 1))


def test_rule_instances_on_comerciante():
    p = load("reduzido")
    f = encode(grown(p, 5))
    clauses = {frozenset(c) for c in f.clauses}
    dentro = var_of(f, PROP, "(dentro pacote caminhão)", 10)
    producers = {
        var_of(f, ACTION, "(carregar pacote caminhão loja1)", 9),
        var_of(f, ACTION, "(carregar pacote caminhão loja2)", 9),
        var_of(f, NOOP, "(dentro pacote caminhão)", 9),
    }
    assert frozenset({-dentro, *producers}) in clauses

    carregar = var_of(f, ACTION, "(carregar pacote caminhão loja1)", 3)
    assert frozenset({-carregar, var_of(f, PROP, "(em pacote loja1)", 2)}) in clauses
    assert frozenset({-carregar, var_of(f, PROP, "(em caminhão loja1)", 2)}) in clauses

    dirigir = var_of(f, ACTION, "(dirigir caminhão loja1 loja2)", 3)
    assert frozenset({-carregar, -dirigir}) in clauses


def test_init_and_goal_units():
    p = load("reduzido")
    f = encode(grown(p, 4))
    units = {c[0] for c in f.clauses if len(c) == 1}
    assert var_of(f, PROP, "(em pacote loja1)", 0) in units
    assert var_of(f, PROP, "(em caminhão loja2)", 0) in units
    assert var_of(f, PROP, "(em pacote loja2)", 8) in units
    assert all(c for c in f.clauses)


@pytest.mark.parametrize("name", ["jantar", "reduzido", "gripper-2", "sussman", "logistics-1"])
def test_clause_count_formula(name):
    g = build_until_goals(load(name))
    f = encode(g)
    assert len(f.clauses) == expected_clause_count(g)
    assert sum(f.family_counts.values()) == len(f.clauses)
    assert f.live_vars() <= set(f.var_map)


def test_clause_count_on_random_graphs():
    rng = random.Random(8)
    for _ in range(50):
        p = random_problem(rng)
        g = PlanGraph(p)
        for _ in range(rng.randint(0, 4)):
            g.expand()
        if p.goal <= g.prop_layers[-1]:
            assert len(encode(g).clauses) == expected_clause_count(g)


# -- simplification ------------------------------------------------------------


def formula(clauses, kinds):
    p = load("jantar")
    var_map = {v: VarInfo(kind, 0, 1 if kind != PROP else 0) for v, kind in kinds.items()}
    return CnfFormula(p, var_map, [tuple(c) for c in clauses], 1)


def test_elimination_example():
    a1, a2, a3, a4, p1, p2 = range(1, 7)
    kinds = {a1: ACTION, a2: ACTION, a3: ACTION, a4: ACTION, p1: PROP, p2: PROP}
    f = formula(
        [(-a3, p1), (-a3, p2), (-a4, p1), (-a4, p2), (-p1, a1, a2), (-p2, a1, a2)],
        kinds,
    )
    out = simplify(f)
    assert {frozenset(c) for c in out.clauses} == {frozenset({-a3, a1, a2}), frozenset({-a4, a1, a2})}
    assert PROP not in {info.kind for info in out.var_map.values()}


def test_persistence_resolution_example():
    # d3 -> (c1 v c2 v m); m -> d1; resolving on m gives d3 -> (c1 v c2 v d1)
    d1, d3, c1, c2, m = range(1, 6)
    f = formula([(-d3, c1, c2, m), (-m, d1)], {d1: PROP, d3: PROP, c1: ACTION, c2: ACTION, m: NOOP})
    resolvent = frozenset({-d3, c1, c2, d1})
    # resolution on the noop alone yields that implication
    pc = next(c for c in f.clauses if m in c)
    nc = next(c for c in f.clauses if -m in c)
    assert frozenset([x for x in pc if x != m] + [x for x in nc if x != -m]) == resolvent
    # and every model of the pair satisfies it
    for m_ in brute_models(f.num_vars, f.clauses):
        assert any(m_[abs(l)] == (l > 0) for l in resolvent)


def test_formula_without_props_unchanged():
    f = formula([(1, 2), (-1, 3)], {1: ACTION, 2: ACTION, 3: NOOP})
    assert sorted(simplify(f).clauses) == sorted(f.clauses)


def test_remove_subsumed():
    assert sorted(remove_subsumed([(1,), (1, 2), (2, 3), (-1, 2, 3)])) == [(1,), (2, 3)]
    assert remove_subsumed([(1,), ()]) == [()]


def projections(f, keep):
    out = set()
    for m in brute_models(f.num_vars, f.clauses):
        out.add(tuple(m[v] for v in keep))
    return out


def test_simplify_preserves_action_projections():
    rng = random.Random(2)
    checked = 0
    while checked < 25:
        p = random_problem(rng, max_props=5, max_actions=3)
        g = build_until_goals(p, max_layers=3)
        if not g.has_goals() or g.depth == 0:
            continue
        f = encode(g)
        if f.num_vars > 20:
            continue
        s = simplify(f)
        keep = sorted(f.action_vars())
        assert projections(f, keep) == projections(CnfFormula(p, f.var_map, s.clauses, f.depth), keep)
        assert (solve_sat(f) is None) == (solve_sat(s) is None)
        checked += 1


# -- decoding and round trips ---------------------------------------------------


def test_jantar_end_to_end():
    p = load("jantar")
    f = encode(grown(p, 2))
    model = solve_sat(f)
    assert model is not None
    plan = decode_model(f, model)
    assert [[p.action_name(a) for a in layer] for layer in plan.action_layers()] == [["(embrulhar)"], ["(cozinhar)"]]
    assert validate(p, plan).valid


def test_jantar_one_layer_unsat():
    p = load("jantar")
    assert solve_sat(encode(grown(p, 1))) is None


def test_goal_at_init_empty_plan():
    p = load("goal-at-init")
    f = encode(PlanGraph(p))
    plan = decode_model(f, solve_sat(f))
    assert plan.step_count == 0


def test_comerciante_satplan():
    p = load("reduzido")
    r = solve_satplan(p)
    assert r.outcome == Outcome.PLAN
    assert (r.plan.action_count, r.plan.step_count) == (4, 4)
    assert validate(p, r.plan).valid


@pytest.mark.parametrize("use_simplify", [False, True])
def test_satplan_soundness_on_fixtures(use_simplify):
    for name in ("jantar", "reduzido", "gripper-2", "sussman", "logistics-1"):
        p = load(name)
        r = solve_satplan(p, use_simplify=use_simplify)
        assert r.outcome == Outcome.PLAN
        assert validate(p, r.plan).valid
        assert r.plan.step_count == graphplan.solve(p).plan.step_count


def test_satplan_unreachable():
    r = solve_satplan(load("unreachable"))
    assert r.outcome == Outcome.UNSOLVABLE and r.note == "criterion=leveled-off"


def test_dimacs_round_trip():
    p = load("reduzido")
    f = encode(grown(p, 4))
    text = to_dimacs(f)
    assert f"p cnf {f.num_vars} {len(f.clauses)}" in text
    assert "c var 1 = prop " in text
    back = parse_dimacs(text, p)
    assert back.var_map == f.var_map
    assert back.clauses == f.clauses
    assert back.depth == f.depth


def test_parse_model_formats():
    assert parse_model("s SATISFIABLE\nv 1 -2\nv 3 0\n") == {1: True, 2: False, 3: True}
    assert parse_model("1 -2 3 0") == {1: True, 2: False, 3: True}


def test_external_model_decodes():
    p = load("jantar")
    f = encode(grown(p, 2))
    model = solve_sat(f)
    text = " ".join(str(v if model[v] else -v) for v in sorted(model)) + " 0\n"
    back = parse_dimacs(to_dimacs(f), p)
    assert decode_model(back, parse_model(text)) == decode_model(f, model)
