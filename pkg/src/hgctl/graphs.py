"""Weighted digraph routines used by the friend-game solvers."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from .core import FriendGame

INF = 10**9


@dataclass(frozen=True)
class WeightedDigraph:
    """Digraph on vertices 0..n-1 with non-negative integer arc weights."""

    n: int
    weights: Mapping[tuple[int, int], int]

    def __post_init__(self):
        for (u, v), w in self.weights.items():
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u}, {v}) out of range")
            if w < 0:
                raise ValueError("arc weights must be non-negative")

    @cached_property
    def succ(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        out: list[list] = [[] for _ in range(self.n)]
        for (u, v), w in sorted(self.weights.items()):
            out[u].append((v, w))
        return tuple(tuple(x) for x in out)

    @cached_property
    def pred(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        inn: list[list] = [[] for _ in range(self.n)]
        for (u, v), w in sorted(self.weights.items()):
            inn[v].append((u, w))
        return tuple(tuple(x) for x in inn)

    def weight_of(self, arcs: Iterable[tuple[int, int]]) -> int:
        return sum(self.weights[a] for a in set(arcs))


def control_weights(fg: FriendGame) -> WeightedDigraph:
    """Friendship digraph where an arc costs 1 iff its tail is an additional agent."""
    w = {}
    for i, j in fg.arcs():
        w[(i, j)] = 1 if i in fg.additional else 0
    return WeightedDigraph(fg.n, w)


@dataclass(frozen=True)
class PathTables:
    dist: np.ndarray      # dist[u, v]: cheapest u -> v path, 0 on the diagonal
    nxt: np.ndarray       # first hop after u on that path, -1 if none
    cycle: np.ndarray     # cycle[v]: cheapest closed walk through v
    cycle_next: np.ndarray

    def path(self, u: int, v: int) -> list[int]:
        """Vertices of the stored cheapest u -> v path, both ends included."""
        if self.dist[u, v] >= INF:
            raise ValueError(f"{v} is unreachable from {u}")
        out = [u]
        while u != v:
            u = int(self.nxt[u, v])
            out.append(u)
        return out

    def cycle_through(self, v: int) -> list[int]:
        """Vertices of the stored cheapest cycle through v, starting at v."""
        if self.cycle[v] >= INF:
            raise ValueError(f"no cycle through {v}")
        u = int(self.cycle_next[v])
        return [v] + self.path(u, v)[:-1]


def all_pairs_min_paths(g: WeightedDigraph) -> PathTables:
    """Floyd-Warshall with next-hop reconstruction."""
    n = g.n
    dist = np.full((n, n), INF, dtype=np.int64)
    nxt = np.full((n, n), -1, dtype=np.int64)
    arc_w = np.full((n, n), INF, dtype=np.int64)
    for (u, v), w in g.weights.items():
        arc_w[u, v] = w
        dist[u, v] = w
        nxt[u, v] = v
    idx = np.arange(n)
    dist[idx, idx] = 0
    nxt[idx, idx] = idx
    for k in range(n):
        via = dist[:, k:k + 1] + dist[k:k + 1, :]
        better = via < dist
        if better.any():
            dist = np.where(better, via, dist)
            nxt = np.where(better, nxt[:, k:k + 1], nxt)
    np.minimum(dist, INF, out=dist)
    # closing arc v -> u followed by the cheapest u -> v path
    closed = np.minimum(arc_w + dist.T, INF)
    cyc_next = np.argmin(closed, axis=1)
    cyc = closed[idx, cyc_next]
    cyc_next = np.where(cyc < INF, cyc_next, -1)
    return PathTables(dist, nxt, cyc, cyc_next)


@dataclass(frozen=True)
class SCCs:
    components: tuple[tuple[int, ...], ...]   # topological order, sources first
    component_of: Mapping[int, int]
    dag: frozenset                            # arcs between component indices

    def largest(self) -> tuple[int, ...]:
        return max(self.components, key=len) if self.components else ()


def sccs(vertices: Iterable[int], successors: Callable[[int], Iterable[int]]) -> SCCs:
    """Tarjan's algorithm, iterative, on the subgraph induced by `vertices`."""
    verts = sorted(set(vertices))
    inside = set(verts)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    found: list[tuple[int, ...]] = []
    counter = 0
    for root in verts:
        if root in index:
            continue
        work = [(root, iter(sorted(w for w in successors(root) if w in inside)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(x for x in successors(w) if x in inside))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                found.append(tuple(sorted(comp)))
    found.reverse()
    where = {v: t for t, comp in enumerate(found) for v in comp}
    dag = set()
    for v in verts:
        for w in successors(v):
            if w in inside and where[v] != where[w]:
                dag.add((where[v], where[w]))
    return SCCs(tuple(found), where, frozenset(dag))


def friend_sccs(fg: FriendGame, vertices: Optional[Iterable[int]] = None) -> SCCs:
    if vertices is None:
        vertices = range(fg.n)
    return sccs(vertices, lambda v: fg.friends[v])


def reaching(targets: Iterable[int], vertices: Iterable[int],
             predecessors: Callable[[int], Iterable[int]]) -> set[int]:
    """Vertices of the induced subgraph that can reach some target (targets included)."""
    inside = set(vertices)
    seen = {t for t in targets if t in inside}
    todo = list(seen)
    while todo:
        v = todo.pop()
        for u in predecessors(v):
            if u in inside and u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


@dataclass(frozen=True)
class SplitGraph:
    graph: WeightedDigraph
    entry: tuple[int, ...]   # vertex receiving the agent's in-arcs
    exit: tuple[int, ...]    # vertex emitting the agent's out-arcs

    def agent_arc(self, agent: int) -> Optional[tuple[int, int]]:
        a, b = self.entry[agent], self.exit[agent]
        return None if a == b else (a, b)


def split_additional(fg: FriendGame) -> SplitGraph:
    """Each additional agent becomes an entry/exit pair joined by a weight-1 arc."""
    n = fg.n
    entry = list(range(n))
    exit_ = list(range(n))
    extra = n
    weights: dict[tuple[int, int], int] = {}
    for w in sorted(fg.additional):
        exit_[w] = extra
        weights[(w, extra)] = 1
        extra += 1
    for i, j in fg.arcs():
        weights[(exit_[i], entry[j])] = 0
    return SplitGraph(WeightedDigraph(extra, weights), tuple(entry), tuple(exit_))


def _plain_dist(g: WeightedDigraph) -> PathTables:
    return all_pairs_min_paths(g)


def two_scss(g: WeightedDigraph, x: int, y: int) -> tuple[int, frozenset]:
    """Cheapest arc set whose subgraph has x and y in one strongly connected component.

    Two-token search: a forward token walks out-arcs, a backward token walks
    in-arcs, and they may swap places by paying a shortest path between them.
    The search ends when both tokens meet at y, having started together at x.
    Returns (INF, empty set) when no such subgraph exists.
    """
    if x == y:
        return 0, frozenset()
    tables = _plain_dist(g)
    d = tables.dist
    n = g.n
    dist: dict[tuple[int, int], int] = {(x, x): 0}
    back: dict[tuple[int, int], tuple] = {}
    heap = [(0, x, x)]
    done = set()
    while heap:
        c, f, b = heapq.heappop(heap)
        if (f, b) in done:
            continue
        done.add((f, b))
        if (f, b) == (y, y):
            break

        def relax(state, cost, how):
            if cost < dist.get(state, INF):
                dist[state] = cost
                back[state] = how
                heapq.heappush(heap, (cost, state[0], state[1]))

        for v, w in g.succ[f]:
            relax((v, b), c + w, ("F", f, b, (f, v)))
        for u, w in g.pred[b]:
            relax((f, u), c + w, ("B", f, b, (u, b)))
        if f != b and d[f, b] < INF:
            relax((b, f), c + int(d[f, b]), ("S", f, b, None))
    if (y, y) not in done:
        return INF, frozenset()
    arcs: set[tuple[int, int]] = set()
    state = (y, y)
    while state != (x, x):
        kind, f, b, arc = back[state]
        if kind == "S":
            p = tables.path(f, b)
            arcs.update(zip(p, p[1:]))
        else:
            arcs.add(arc)
        state = (f, b)
    cost = dist[(y, y)]
    return cost, frozenset(arcs)
