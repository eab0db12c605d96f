import networkx as nx
from hypothesis import given, strategies as st

from hgctl.core import FriendGame
from hgctl.gen import gen_setcover_fri_gr, SetCover
from hgctl.graphs import (
    INF, WeightedDigraph, all_pairs_min_paths, control_weights, friend_sccs, split_additional,
    sccs, two_scss,
)

from brute import bnb_two_scss, friend_digraph, joined_bits, strongly_joined
from conftest import example_game, friend_games


@st.composite
def digraphs(draw, max_n=6, max_w=1):
    n = draw(st.integers(1, max_n))
    w = {}
    for u in range(n):
        for v in range(n):
            if u != v and draw(st.booleans()):
                w[(u, v)] = draw(st.integers(0, max_w))
    return WeightedDigraph(n, w)


def _nx(g):
    h = nx.DiGraph()
    h.add_nodes_from(range(g.n))
    for (u, v), w in g.weights.items():
        h.add_edge(u, v, weight=w)
    return h


def test_control_weights_all_original_zero():
    fg = FriendGame.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
    assert set(control_weights(fg).weights.values()) == {0}


def test_control_weights_additional_tail_costs_one():
    fg = FriendGame.from_arcs(2, [(1, 0), (0, 1)], additional=[1])
    assert dict(control_weights(fg).weights) == {(0, 1): 0, (1, 0): 1}


def test_control_weights_example_split():
    g = example_game()
    fg = FriendGame.from_arcs(5, list(g.arcs()), additional=g.additional)
    w = control_weights(fg).weights
    assert all(w[(i, j)] == (1 if i in (3, 4) else 0) for i, j in w)
    assert w[(4, 2)] == 1 and w[(0, 4)] == 0


def test_two_cycle_free():
    t = all_pairs_min_paths(WeightedDigraph(2, {(0, 1): 0, (1, 0): 0}))
    assert t.dist[0, 1] == 0 and t.cycle[0] == 0


def test_path_without_return():
    t = all_pairs_min_paths(WeightedDigraph(3, {(0, 1): 1, (1, 2): 1}))
    assert t.dist[0, 2] == 2 and t.cycle[0] >= INF
    assert t.path(0, 2) == [0, 1, 2]


@given(digraphs(max_n=6, max_w=3))
def test_min_paths_match_simple_path_enumeration(g):
    h = _nx(g)
    t = all_pairs_min_paths(g)
    for u in range(g.n):
        for v in range(g.n):
            if u == v:
                assert t.dist[u, v] == 0
                continue
            costs = [nx.path_weight(h, p, "weight") for p in nx.all_simple_paths(h, u, v)]
            assert t.dist[u, v] == (min(costs) if costs else INF)
            if costs:
                p = t.path(u, v)
                assert p[0] == u and p[-1] == v
                assert g.weight_of(zip(p, p[1:])) == t.dist[u, v]
    best = {v: INF for v in range(g.n)}
    for cyc in nx.simple_cycles(h):
        c = sum(g.weights[(a, b)] for a, b in zip(cyc, cyc[1:] + cyc[:1]))
        for v in cyc:
            best[v] = min(best[v], c)
    for v in range(g.n):
        assert t.cycle[v] == best[v]
        if best[v] < INF:
            cyc = t.cycle_through(v)
            assert g.weight_of(zip(cyc, cyc[1:] + cyc[:1])) == best[v]


@given(digraphs(max_n=6, max_w=2))
def test_triangle_inequality_and_cycle_identity(g):
    t = all_pairs_min_paths(g)
    n = g.n
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if t.dist[a, b] < INF and t.dist[b, c] < INF:
                    assert t.dist[a, c] <= t.dist[a, b] + t.dist[b, c]
        closing = [w + t.dist[u, a] for u, w in g.succ[a] if t.dist[u, a] < INF]
        assert t.cycle[a] == (min(closing) if closing else INF)


def test_sccs_dag_all_singletons():
    succ = {0: [1, 2], 1: [2], 2: []}
    s = sccs(range(3), succ.__getitem__)
    assert sorted(s.components) == [(0,), (1,), (2,)]


def test_sccs_three_cycle():
    succ = {0: [1], 1: [2], 2: [0]}
    assert [sorted(c) for c in sccs(range(3), succ.__getitem__).components] == [[0, 1, 2]]


def test_setcover_gadget_with_cover_strongly_connected():
    sc = SetCover(3, (frozenset({1, 2}), frozenset({3}), frozenset({2, 3})), 2)
    fg, _ = gen_setcover_fri_gr(sc)
    keep = [0, 1, 2, 3, 4]          # u1..u3 plus the sets {1,2} and {3}
    assert len(friend_sccs(fg, keep).components) == 1


@given(friend_games(max_n=7))
def test_sccs_match_networkx(fg):
    s = friend_sccs(fg)
    want = {frozenset(c) for c in nx.strongly_connected_components(friend_digraph(fg))}
    assert {frozenset(c) for c in s.components} == want
    # topological order: component arcs point forward, and the DAG is acyclic
    assert all(a < b for a, b in s.dag)
    for i, j in fg.arcs():
        a, b = s.component_of[i], s.component_of[j]
        assert a == b or (a, b) in s.dag


def test_split_without_additional_is_same_graph():
    fg = FriendGame.from_arcs(3, [(0, 1), (1, 2)])
    sg = split_additional(fg)
    assert sg.graph.n == 3 and dict(sg.graph.weights) == {(0, 1): 0, (1, 2): 0}


def test_split_rewires_additional_agent():
    fg = FriendGame.from_arcs(3, [(0, 1), (1, 2)], additional=[1])
    sg = split_additional(fg)
    w1, w2 = sg.agent_arc(1)
    assert dict(sg.graph.weights) == {(0, w1): 0, (w1, w2): 1, (w2, 2): 0}


def test_split_example_has_seven_vertices():
    g = example_game()
    fg = FriendGame.from_arcs(5, list(g.arcs()), additional=g.additional)
    assert split_additional(fg).graph.n == 7


@given(friend_games(max_n=6, split=True))
def test_split_weight_counts_additional_agents(fg):
    sg = split_additional(fg)
    paid = {sg.agent_arc(w) for w in fg.additional}
    assert {a for a, c in sg.graph.weights.items() if c == 1} == paid
    assert sg.graph.weight_of(sg.graph.weights) == len(fg.additional)


def test_two_scss_same_terminal():
    assert two_scss(WeightedDigraph(1, {}), 0, 0) == (0, frozenset())


def test_two_scss_two_cycle():
    g = WeightedDigraph(2, {(0, 1): 1, (1, 0): 1})
    assert two_scss(g, 0, 1) == (2, frozenset({(0, 1), (1, 0)}))


def test_two_scss_disconnected():
    g = WeightedDigraph(4, {(0, 2): 0, (2, 0): 0, (1, 3): 0})
    assert two_scss(g, 0, 1)[0] >= INF


@given(digraphs(max_n=7, max_w=3), st.data())
def test_two_scss_matches_branch_and_bound(g, data):
    x = data.draw(st.integers(0, g.n - 1))
    y = data.draw(st.integers(0, g.n - 1))
    cost, arcs = two_scss(g, x, y)
    want = bnb_two_scss(g.n, dict(g.weights), x, y)
    if x == y:
        assert cost == 0
        return
    assert (None if cost >= INF else cost) == want
    if want is not None:
        assert arcs <= set(g.weights)
        assert g.weight_of(arcs) == cost
        assert strongly_joined(g.n, arcs, x, y)


@given(digraphs(max_n=6, max_w=2), st.data())
def test_two_scss_bounded_by_cycle_through_both(g, data):
    x, y = data.draw(st.integers(0, g.n - 1)), data.draw(st.integers(0, g.n - 1))
    t = all_pairs_min_paths(g)
    if x != y and t.dist[x, y] < INF and t.dist[y, x] < INF:
        assert two_scss(g, x, y)[0] <= t.dist[x, y] + t.dist[y, x]


@given(digraphs(max_n=5), st.data())
def test_bit_reachability_matches_networkx(g, data):
    x, y = data.draw(st.integers(0, g.n - 1)), data.draw(st.integers(0, g.n - 1))
    arcs = list(g.weights)
    assert joined_bits(g.n, arcs, x, y) == strongly_joined(g.n, arcs, x, y)
