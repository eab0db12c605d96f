import pytest
from hypothesis import given, strategies as st

from hgctl.control_fri import (
    fri_addag_cs, fri_addag_na_ir, fri_addag_ns_sym, fri_addag_pa_ir, fri_gr_addag,
    fri_gr_delag, fri_route, solve_fri,
)
from hgctl.core import (
    Action, ControlQuery, GameClass, Goal, GoalKind, Partition, Route, Stability, final_agents,
)
from hgctl.exact import oracle_control
from hgctl.gen import SetCover, gen_setcover_fri_gr
from hgctl.stability import goal_holds, is_stable

from brute import subsets
from conftest import friend_games, friends

GENERAL = GameClass(False, False)
SYM = GameClass(False, True)
DAG = GameClass(True, False)


def test_routes():
    assert fri_route(Stability.IR, GoalKind.NA, Action.ADD, GENERAL) is Route.POLY
    assert fri_route(Stability.IR, GoalKind.NA, Action.DEL, GENERAL) is Route.IMMUNE
    assert fri_route(Stability.NS, GoalKind.PA, Action.ADD, DAG) is Route.NEVER
    assert fri_route(Stability.NS, GoalKind.PA, Action.ADD, GENERAL) is Route.EXACT
    assert fri_route(Stability.NS, GoalKind.PA, Action.DEL, SYM) is Route.IMMUNE
    assert fri_route(Stability.CS, GoalKind.GR, Action.ADD, GENERAL) is Route.XP
    assert fri_route(Stability.CS, GoalKind.GR, Action.DEL, GENERAL) is Route.POLY


def test_dag_ns_pa_is_never():
    fg = friends(3, [(0, 1), (1, 2)], additional=[2])
    out = solve_fri(ControlQuery(fg, Stability.NS, Goal.pa(0, 1), Action.ADD, 1))
    assert not out.decision and out.route is Route.NEVER


def test_pa_mutual_friends_free():
    fg = friends(3, [(0, 1), (1, 0)])
    out = fri_addag_pa_ir(fg, 0, 1, 0)
    assert out.decision and out.witness.chosen == frozenset()
    assert out.witness.partition.together(0, 1)


def test_pa_same_component_free():
    fg = friends(4, [(0, 2), (2, 1), (1, 3), (3, 0)])
    assert fri_addag_pa_ir(fg, 0, 1, 0).decision


def test_na_free_cycle():
    fg = friends(3, [(0, 1), (1, 2), (2, 0)])
    assert fri_addag_na_ir(fg, 0, 0).decision


def test_na_route_through_two_additional():
    # x -> w1 -> w2 -> c <-> d, with c, d original
    fg = friends(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 3)], additional=[1, 2])
    for k in range(4):
        d = fri_addag_na_ir(fg, 0, k).decision
        assert d == (k >= 2)
        assert d == oracle_control(ControlQuery(fg, Stability.IR, Goal.na(0), Action.ADD, k)).decision


def test_na_isolated_is_no():
    assert not fri_addag_na_ir(friends(3, [(1, 2), (2, 1)]), 0, 5).decision


def test_cs_same_component_free():
    fg = friends(3, [(0, 1), (1, 2), (2, 0)])
    assert fri_addag_cs(fg, Goal.pa(0, 1), 0).decision


def test_cs_bridge_through_additional():
    fg = friends(3, [(0, 2), (2, 1), (1, 0)], additional=[2])
    assert not fri_addag_cs(fg, Goal.pa(0, 1), 0).decision
    out = fri_addag_cs(fg, Goal.pa(0, 1), 1)
    assert out.decision and out.witness.chosen == frozenset({2})


def test_cs_separate_components_never_joined():
    fg = friends(4, [(0, 2), (2, 0), (1, 3), (3, 1)])
    assert not any(fri_addag_cs(fg, Goal.pa(0, 1), k).decision for k in range(4))


def test_ns_sym_both_have_friends():
    fg = friends(4, [(0, 2), (2, 0), (1, 3), (3, 1)])
    assert fri_addag_ns_sym(fg, Goal.pa(0, 1), 0).decision


def test_ns_sym_shared_helper():
    fg = friends(3, [(0, 2), (2, 0), (1, 2), (2, 1)], additional=[2])
    assert not fri_addag_ns_sym(fg, Goal.pa(0, 1), 0).decision
    assert fri_addag_ns_sym(fg, Goal.pa(0, 1), 1).decision


def test_ns_sym_distinct_helpers_need_two():
    fg = friends(5, [(0, 2), (2, 0), (1, 3), (3, 1)], additional=[2, 3])
    q = lambda k: ControlQuery(fg, Stability.NS, Goal.pa(0, 1), Action.ADD, k)
    assert not fri_addag_ns_sym(fg, Goal.pa(0, 1), 1).decision
    assert not oracle_control(q(1)).decision
    assert fri_addag_ns_sym(fg, Goal.pa(0, 1), 2).decision and oracle_control(q(2)).decision


def test_gr_add_everyone_has_friend():
    fg = friends(3, [(0, 1), (1, 2), (2, 1)])
    assert fri_gr_addag(fg, Stability.IR, 0).decision


@pytest.mark.parametrize("stability", [Stability.IR, Stability.CS])
def test_gr_add_setcover_gadget(stability):
    sc = SetCover(3, (frozenset({1, 2}), frozenset({3}), frozenset({2, 3}), frozenset({1})), 2)
    fg, _ = gen_setcover_fri_gr(sc)
    assert not fri_gr_addag(fg, stability, 1).decision
    out = fri_gr_addag(fg, stability, 2)
    assert out.decision and len(out.witness.chosen) == 2


def test_gr_add_friendless_is_no():
    fg = friends(3, [(1, 2), (2, 1)], additional=[2])
    assert not any(fri_gr_addag(fg, Stability.IR, k).decision for k in range(3))


@pytest.mark.parametrize("stability", list(Stability))
def test_gr_del_strongly_connected(stability):
    fg = friends(3, [(0, 1), (1, 2), (2, 0)])
    out = fri_gr_delag(fg, stability, 0)
    assert out.decision and out.witness.chosen == frozenset()


def test_gr_del_path_keeps_one_agent():
    fg = friends(3, [(0, 1), (1, 2)])
    assert [fri_gr_delag(fg, Stability.IR, k).decision for k in range(4)] == [False, False, True, True]
    out = fri_gr_delag(fg, Stability.IR, 2)
    assert out.route is Route.TRIVIAL and len(out.witness.partition.agents) == 1


def test_gr_del_two_triangles():
    fg = friends(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert [fri_gr_delag(fg, Stability.CS, k).decision for k in range(5)] == [False] * 3 + [True] * 2


def test_immune_same_component():
    fg = friends(3, [(0, 1), (1, 2), (2, 0)])
    out = solve_fri(ControlQuery(fg, Stability.CS, Goal.pa(0, 1), Action.DEL, 5))
    assert out.decision and out.route is Route.IMMUNE and out.witness.chosen == frozenset()


def test_immune_friendless_agent():
    fg = friends(4, [(1, 2), (2, 1), (2, 3)])
    for k in range(4):
        out = solve_fri(ControlQuery(fg, Stability.IR, Goal.na(0), Action.DEL, k))
        assert not out.decision and out.route is Route.IMMUNE


def test_immune_symmetric_ns():
    fg = friends(4, [(0, 2), (2, 0), (1, 3), (3, 1)])
    out = solve_fri(ControlQuery(fg, Stability.NS, Goal.pa(0, 1), Action.DEL, 1))
    assert out.decision and out.route is Route.IMMUNE


def _queries(fg, k):
    for stability in Stability:
        goals = [Goal.gr()]
        for x in sorted(fg.original):
            goals.append(Goal.na(x))
            goals += [Goal.pa(x, y) for y in sorted(fg.original) if y > x]
        for goal in goals:
            yield ControlQuery(fg, stability, goal, Action.ADD, k)
            if not fg.additional:
                yield ControlQuery(fg, stability, goal, Action.DEL, k)


@given(friend_games(min_n=1, max_n=5, split=True), st.integers(0, 2))
def test_solver_matches_oracle(fg, k):
    for q in _queries(fg, k):
        out, ref = solve_fri(q), oracle_control(q)
        assert out.decision == ref.decision, (q.stability, q.goal, q.action)
        if out.decision:
            w = out.witness
            assert len(w.chosen) == len(ref.witness.chosen)
            assert goal_holds(w.partition, q.goal)
            assert w.partition.agents == final_agents(q, w.chosen)
            assert is_stable(fg, w.partition, q.stability)


@given(friend_games(min_n=2, max_n=6, split=True))
def test_addag_monotone_in_budget(fg):
    for q in _queries(fg, 0):
        if q.action is Action.DEL:
            continue
        prev = False
        for k in range(3):
            d = solve_fri(ControlQuery(fg, q.stability, q.goal, q.action, k)).decision
            assert d or not prev
            prev = d


@given(friend_games(min_n=1, max_n=7))
def test_gr_delag_deletes_fewest(fg):
    for stability in (Stability.IR, Stability.CS):
        out = fri_gr_delag(fg, stability, fg.n)
        best = len(out.witness.chosen)
        for drop in subsets(range(fg.n)):
            if len(drop) >= best:
                break
            keep = [a for a in range(fg.n) if a not in drop]
            assert not is_stable(fg, Partition.grand(keep), stability), drop
