import time

import pytest
from hypothesis import given, strategies as st

from hgctl.control_add import add_delag_ir_immune, add_gr, add_ir_na_special, add_route, solve_add
from hgctl.core import (
    Action, AdditiveGame, ControlQuery, GameClass, Goal, GoalKind, Partition, Route, Stability,
    final_agents,
)
from hgctl.exact import oracle_control
from hgctl.gen import SetCover, gen_random, gen_rx3c_ir_na, gen_setcover_add_gr, RX3C
from hgctl.stability import goal_holds, is_stable

from conftest import additive_games, example_game

DAG = GameClass(True, False)
SYM = GameClass(False, True)
GENERAL = GameClass(False, False)


def test_routes():
    assert add_route(Stability.IR, GoalKind.NA, Action.ADD, DAG) is Route.POLY
    assert add_route(Stability.IS, GoalKind.PA, Action.DEL, SYM) is Route.EXACT
    assert add_route(Stability.CS, GoalKind.GR, Action.ADD, DAG) is Route.XP
    assert add_route(Stability.CS, GoalKind.GR, Action.ADD, GENERAL) is Route.EXACT
    assert add_route(Stability.IR, GoalKind.PA, Action.DEL, GENERAL) is Route.IMMUNE
    assert add_route(Stability.IR, GoalKind.NA, Action.ADD, GENERAL) is Route.EXACT


def test_special_dag_single_positive_arc():
    g = AdditiveGame.from_arcs(2, [(0, 1, 1)])
    out = add_ir_na_special(g, 0, 0)
    assert out.decision and out.witness.partition == Partition.grand([0, 1])


def test_special_symmetric_all_negative():
    g = AdditiveGame.from_arcs(3, [(0, 1, -1), (1, 0, -1), (0, 2, -2), (2, 0, -2)])
    assert not any(add_ir_na_special(g, 0, k).decision for k in range(3))


def test_special_budget_gate():
    g = AdditiveGame.from_arcs(3, [(0, 1, -1), (1, 0, -1), (0, 2, 1), (2, 0, 1)], additional=[2])
    assert not add_ir_na_special(g, 0, 0).decision
    out = add_ir_na_special(g, 0, 1)
    assert out.decision and out.witness.chosen == frozenset({2})


def test_gr_already_ir():
    g = AdditiveGame.from_arcs(2, [(0, 1, 2), (1, 0, 1)])
    out = add_gr(g, Stability.IR, Action.ADD, 0)
    assert out.decision and out.witness.chosen == frozenset()


def test_gr_setcover_dag_addag():
    sc = SetCover(3, (frozenset({1, 2}), frozenset({3}), frozenset({1}), frozenset({2, 3})), 2)
    g, k = gen_setcover_add_gr(sc, "add", "dag")
    assert not add_gr(g, Stability.IR, Action.ADD, 1).decision
    out = add_gr(g, Stability.IR, Action.ADD, k)
    assert out.decision and len(out.witness.chosen) == 2


@pytest.mark.parametrize("variant", ["dag", "sym"])
def test_gr_setcover_delag(variant):
    sc = SetCover(3, (frozenset({1, 2}), frozenset({3}), frozenset({1}), frozenset({2, 3})), 2)
    g, k = gen_setcover_add_gr(sc, "del", variant)
    assert not add_gr(g, Stability.NS, Action.DEL, 1).decision
    out = add_gr(g, Stability.NS, Action.DEL, k)
    assert out.decision
    # swapping each deleted element agent for a set containing it keeps the size
    swap = set()
    for a in out.witness.chosen:
        name = g.names[a]
        if name.startswith("u"):
            i = int(name[1:])
            name = f"s{min(j + 1 for j, S in enumerate(sc.sets) if i in S)}"
        swap.add(g.index_of(name))
    assert len(swap) <= len(out.witness.chosen)
    keep = sorted(set(range(g.n)) - swap)
    assert is_stable(g, Partition.grand(keep), Stability.NS)


def test_gr_negative_sums_need_budget():
    g = AdditiveGame.from_arcs(2, [(0, 1, -1), (1, 0, 1)])
    assert not add_gr(g, Stability.IR, Action.ADD, 0).decision


def test_immune_dag_zero_pair():
    g = AdditiveGame.from_arcs(3, [(0, 2, -1)])
    out = add_delag_ir_immune(g, Goal.na(0))
    assert out.decision and out.witness.chosen == frozenset() and out.route is Route.IMMUNE


def test_immune_no_instance_gadget():
    no = RX3C(2, ((1, 2, 3), (1, 2, 4), (1, 5, 6), (2, 5, 6), (3, 4, 5), (3, 4, 6)))
    g, x = gen_rx3c_ir_na(no)
    out = solve_add(ControlQuery(g, Stability.IR, Goal.na(x), Action.DEL, 4))
    assert not out.decision and out.route is Route.IMMUNE


def test_immune_symmetric_all_negative():
    g = AdditiveGame.from_arcs(2, [(0, 1, -3), (1, 0, -3)])
    assert not add_delag_ir_immune(g, Goal.na(0)).decision


def test_example_routes():
    g = example_game()
    out = solve_add(ControlQuery(g, Stability.IR, Goal.na(0), Action.ADD, 1))
    assert out.decision and out.witness.chosen == frozenset({4}) and out.route is Route.EXACT
    gu = g.restrict([0, 1, 2])
    for k in range(6):
        out = solve_add(ControlQuery(gu, Stability.IR, Goal.na(0), Action.DEL, k))
        assert not out.decision and out.route is Route.IMMUNE


def _queries(g, k):
    for stability in Stability:
        goals = [Goal.gr()]
        for x in sorted(g.original):
            goals.append(Goal.na(x))
            goals += [Goal.pa(x, y) for y in sorted(g.original) if y > x]
        for goal in goals:
            yield ControlQuery(g, stability, goal, Action.ADD, k)
            if not g.additional:
                yield ControlQuery(g, stability, goal, Action.DEL, k)


@given(additive_games(max_n=5, split=True), st.integers(0, 2))
def test_solver_matches_oracle(g, k):
    for q in _queries(g, k):
        out, ref = solve_add(q), oracle_control(q)
        assert out.decision == ref.decision, (q.stability, q.goal, q.action)
        if out.decision:
            w = out.witness
            assert len(w.chosen) == len(ref.witness.chosen)
            assert goal_holds(w.partition, q.goal)
            assert w.partition.agents == final_agents(q, w.chosen)
            assert is_stable(g, w.partition, q.stability)


@given(additive_games(max_n=7, split=True), st.data())
def test_gr_k0_equals_verifier(g, data):
    stability = data.draw(st.sampled_from(list(Stability)))
    grand = Partition.grand(sorted(g.original))
    assert add_gr(g, stability, Action.ADD, 0).decision == bool(is_stable(g, grand, stability))


@given(st.integers(0, 10**6), st.integers(1, 7), st.integers(0, 2))
def test_dag_gr_core_equals_ir(seed, n, k):
    g = gen_random("additive", n, 0.5, dag=True, split_fraction=0.3, seed=seed)
    for action in (Action.ADD, Action.DEL):
        h = g if action is Action.ADD else g.with_split(())
        a = add_gr(h, Stability.CS, action, k).decision
        assert a == add_gr(h, Stability.IR, action, k).decision


@given(st.integers(0, 10**6), st.integers(2, 6), st.booleans())
def test_special_matches_oracle_on_dag_and_symmetric(seed, n, symmetric):
    g = gen_random("additive", n, 0.5, symmetric=symmetric, dag=not symmetric,
                   split_fraction=0.3, seed=seed)
    for x in sorted(g.original):
        for k in range(2):
            q = ControlQuery(g, Stability.IR, Goal.na(x), Action.ADD, k)
            assert add_ir_na_special(g, x, k).decision == oracle_control(q).decision


def test_gr_needs_two_additions_at_scale():
    # 1000 agents, 200 of them additional; agent 0 is pulled down and only two helpers fix it
    n, extra = 1000, 200
    additional = list(range(n - extra, n))
    arcs = [(0, 1, -2), (0, additional[7], 1), (0, additional[150], 1)]
    arcs += [(a, 0, 1) for a in additional]
    g = AdditiveGame.from_arcs(n, arcs, additional)
    t = time.perf_counter()
    out = add_gr(g, Stability.IR, Action.ADD, 2)
    assert time.perf_counter() - t < 30
    assert out.decision and out.witness.chosen == frozenset({additional[7], additional[150]})
    assert not add_gr(g, Stability.IR, Action.ADD, 1).decision
