"""Instance generators: random games and hardness gadgets with their source instances."""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterator, Optional, Sequence

from .core import AdditiveGame, FriendGame, InvalidGame, Partition


@dataclass(frozen=True)
class RX3C:
    """Exact cover by 3-sets where each of the 3*n_hat elements lies in exactly three sets."""

    n_hat: int
    sets: tuple[tuple[int, int, int], ...]   # elements are 1..3*n_hat

    def __post_init__(self):
        m = 3 * self.n_hat
        if len(self.sets) != m:
            raise InvalidGame("an RX3C instance has exactly 3*n_hat sets")
        count = [0] * (m + 1)
        for s in self.sets:
            if len(set(s)) != 3 or any(not 1 <= e <= m for e in s):
                raise InvalidGame(f"bad triple {s}")
            for e in s:
                count[e] += 1
        if any(c != 3 for c in count[1:]):
            raise InvalidGame("every element must lie in exactly three sets")


@dataclass(frozen=True)
class SetCover:
    universe: int                             # elements 1..universe
    sets: tuple[frozenset, ...]
    h: int

    def __post_init__(self):
        for s in self.sets:
            if not s or any(not 1 <= e <= self.universe for e in s):
                raise InvalidGame(f"bad set {sorted(s)}")

    def covers_everything(self) -> bool:
        return set().union(*self.sets) >= set(range(1, self.universe + 1)) if self.sets else self.universe == 0


def planted_rx3c(n_hat: int, seed: int = 0) -> tuple[RX3C, tuple[int, ...]]:
    """Three stacked random exact covers; returns the instance and one known cover."""
    rng = random.Random(seed)
    m = 3 * n_hat
    sets = []
    for _ in range(3):
        elems = list(range(1, m + 1))
        rng.shuffle(elems)
        sets.extend(tuple(sorted(elems[t:t + 3])) for t in range(0, m, 3))
    order = list(range(m))
    rng.shuffle(order)
    shuffled = tuple(sets[t] for t in order)
    cover = tuple(sorted(order.index(t) for t in range(n_hat)))
    return RX3C(n_hat, shuffled), cover


def random_rx3c(n_hat: int, seed: int = 0, plant: bool = False) -> RX3C:
    """Configuration-model sampler; `plant` stacks three disjoint covers instead."""
    if plant:
        return planted_rx3c(n_hat, seed)[0]
    rng = random.Random(seed)
    m = 3 * n_hat
    while True:
        stubs = [e for e in range(1, m + 1) for _ in range(3)]
        rng.shuffle(stubs)
        triples = [tuple(sorted(stubs[t:t + 3])) for t in range(0, len(stubs), 3)]
        if all(len(set(t)) == 3 for t in triples):
            return RX3C(n_hat, tuple(triples))


def all_rx3c(n_hat: int) -> Iterator[RX3C]:
    """Every RX3C instance up to reordering of its sets."""
    m = 3 * n_hat
    triples = list(combinations(range(1, m + 1), 3))
    for pick in combinations_with_replacement(range(len(triples)), m):
        count = [0] * (m + 1)
        ok = True
        for t in pick:
            for e in triples[t]:
                count[e] += 1
                if count[e] > 3:
                    ok = False
                    break
            if not ok:
                break
        if ok and all(c == 3 for c in count[1:]):
            yield RX3C(n_hat, tuple(triples[t] for t in pick))


def solve_rx3c(inst: RX3C) -> Optional[tuple[int, ...]]:
    """Indices (0-based) of an exact cover, or None."""
    m = 3 * inst.n_hat
    by_elem: dict[int, list[int]] = {e: [] for e in range(1, m + 1)}
    for j, s in enumerate(inst.sets):
        for e in s:
            by_elem[e].append(j)

    def go(covered: frozenset, picked: tuple[int, ...]):
        if len(covered) == m:
            return picked
        e = min(set(range(1, m + 1)) - covered)
        for j in by_elem[e]:
            s = set(inst.sets[j])
            if not s & covered:
                hit = go(covered | s, picked + (j,))
                if hit is not None:
                    return hit
        return None

    hit = go(frozenset(), ())
    return None if hit is None else tuple(sorted(hit))


def min_set_cover(sc: SetCover) -> Optional[int]:
    """Fewest sets covering the universe, or None if the union falls short."""
    target = set(range(1, sc.universe + 1))
    for size in range(len(sc.sets) + 1):
        for pick in combinations(sc.sets, size):
            if set().union(*pick) >= target:
                return size
    return None


def max_clique(n: int, edges: Sequence[tuple[int, int]]) -> int:
    adj = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    best = 0

    def grow(size: int, cand: set):
        nonlocal best
        best = max(best, size)
        for v in sorted(cand):
            grow(size + 1, cand & adj[v])
            cand = cand - {v}

    grow(0, set(range(n)))
    return best


class _Builder:
    def __init__(self):
        self.names: list[str] = []
        self.utils: dict[tuple[int, int], int] = {}

    def agent(self, name: str) -> int:
        self.names.append(name)
        return len(self.names) - 1

    def arc(self, a: int, b: int, w: int):
        self.utils[(a, b)] = w

    def both(self, a: int, b: int, w: int):
        self.utils[(a, b)] = w
        self.utils[(b, a)] = w

    def game(self, additional=()) -> AdditiveGame:
        return AdditiveGame(len(self.names), self.utils, None, frozenset(additional), tuple(self.names))


def _intersect(inst: RX3C, j: int, l: int) -> bool:
    return bool(set(inst.sets[j]) & set(inst.sets[l]))


def gen_rx3c_ir_na(inst: RX3C) -> tuple[AdditiveGame, int]:
    """IR with x not alone, general utilities: yes iff the RX3C instance is."""
    b = _Builder()
    m = 3 * inst.n_hat
    x = b.agent("x")
    y0 = b.agent("y0")
    y1 = b.agent("y1")
    e = [b.agent(f"e{i}") for i in range(1, m + 1)]
    s = [b.agent(f"s{j}") for j in range(1, m + 1)]
    for a in range(1, len(b.names)):
        b.arc(a, x, -1)
    for i in range(m - 1):
        b.arc(e[i], e[i + 1], 1)
    b.arc(e[m - 1], y0, 1)
    b.arc(y0, y1, 1)
    b.arc(y1, e[0], 1)
    for i in range(m):
        b.arc(e[i], y1, -1)
    for j, trip in enumerate(inst.sets):
        for el in trip:
            b.arc(e[el - 1], s[j], 1)
        b.arc(s[j], y1, 1)
        for l in range(j + 1, m):
            if _intersect(inst, j, l):
                b.arc(s[j], s[l], -1)
    return b.game(), x


def forward_rx3c_ir_na(game: AdditiveGame, cover: Sequence[int]) -> Partition:
    m = game.n
    coal = [game.index_of(n) for n in ("x", "y0", "y1")]
    coal += [a for a in range(m) if game.names[a].startswith("e")]
    coal += [game.index_of(f"s{j + 1}") for j in cover]
    return Partition.with_coalition(coal, range(m))


def gen_rx3c_isns_dag(inst: RX3C) -> tuple[AdditiveGame, int, int]:
    """IS/NS with acyclic utilities; goals NA(x) and PA(x, y)."""
    b = _Builder()
    m = 3 * inst.n_hat
    x = b.agent("x")
    y = b.agent("y")
    e = [b.agent(f"e{i}") for i in range(1, m + 1)]
    s = [b.agent(f"s{j}") for j in range(1, m + 1)]
    d = [[b.agent(f"d{l}_{z}") for z in (1, 2, 3)] for l in range(1, 2 * inst.n_hat + 1)]
    b.arc(y, x, 1)
    for a in range(2, len(b.names)):
        b.arc(x, a, -1)
    for j, trip in enumerate(inst.sets):
        b.arc(y, s[j], 1)
        for el in trip:
            b.arc(s[j], e[el - 1], 1)
        for tri in d:
            for a in tri:
                b.arc(s[j], a, 1)
    for d1, d2, d3 in d:
        b.arc(d1, d2, 1)
        b.arc(d1, d3, 1)
        b.arc(d2, d3, 1)
    return b.game(), x, y


def forward_rx3c_isns_dag(game: AdditiveGame, inst: RX3C, cover: Sequence[int]) -> Partition:
    m = 3 * inst.n_hat
    blocks = [[game.index_of("x"), game.index_of("y")]]
    rest = iter(range(1, 2 * inst.n_hat + 1))
    for j in range(m):
        sj = game.index_of(f"s{j + 1}")
        if j in cover:
            blocks.append([sj] + [game.index_of(f"e{el}") for el in inst.sets[j]])
        else:
            l = next(rest)
            blocks.append([sj] + [game.index_of(f"d{l}_{z}") for z in (1, 2, 3)])
    return Partition(blocks)


def gen_rx3c_isns_sym(inst: RX3C) -> tuple[AdditiveGame, int, int]:
    """IS/NS with symmetric utilities; goals NA(x) and PA(x, y)."""
    b = _Builder()
    m = 3 * inst.n_hat
    x = b.agent("x")
    y = b.agent("y")
    e = [b.agent(f"e{i}") for i in range(1, m + 1)]
    s = [b.agent(f"s{j}") for j in range(1, m + 1)]
    d = [b.agent(f"d{l}") for l in range(1, 2 * inst.n_hat + 1)]
    b.both(x, y, 1)
    for a in range(2, len(b.names)):
        b.both(x, a, -1)
    for j, trip in enumerate(inst.sets):
        b.both(s[j], y, 1)
        for el in trip:
            b.both(s[j], e[el - 1], 1)
        for dl in d:
            b.both(s[j], dl, 3)
    return b.game(), x, y


def forward_rx3c_isns_sym(game: AdditiveGame, inst: RX3C, cover: Sequence[int]) -> Partition:
    m = 3 * inst.n_hat
    blocks = [[game.index_of("x"), game.index_of("y")]]
    rest = iter(range(1, 2 * inst.n_hat + 1))
    for j in range(m):
        sj = game.index_of(f"s{j + 1}")
        if j in cover:
            blocks.append([sj] + [game.index_of(f"e{el}") for el in inst.sets[j]])
        else:
            blocks.append([sj, game.index_of(f"d{next(rest)}")])
    return Partition(blocks)


def gen_rx3c_ir_pa_dag(inst: RX3C) -> tuple[AdditiveGame, int, int]:
    """IR with a pair goal, acyclic utilities of bounded degree; goal PA(a0, a1)."""
    b = _Builder()
    m = 3 * inst.n_hat
    a = [b.agent(f"a{i}") for i in range(0, m + 1)]
    e = [None] + [b.agent(f"e{i}") for i in range(1, m + 1)]
    s = [b.agent(f"s{j}") for j in range(1, m + 1)]
    for i in range(0, m - 1):
        b.arc(a[i], a[i + 1], -2)
        b.arc(a[i], e[i + 1], 1)
        b.arc(a[i], a[i + 2], 1)
    b.arc(a[m - 1], a[m], -1)
    b.arc(a[m - 1], e[m], 1)
    for i in range(1, m + 1):
        b.arc(e[i], a[i], -1)
    for j, trip in enumerate(inst.sets):
        for el in trip:
            b.arc(e[el], s[j], 1)
        for l in range(j + 1, m):
            if _intersect(inst, j, l):
                b.arc(s[j], s[l], -1)
    return b.game(), a[0], a[1]


def forward_rx3c_ir_pa_dag(game: AdditiveGame, inst: RX3C, cover: Sequence[int]) -> Partition:
    coal = [i for i in range(game.n) if game.names[i][0] in "ae"]
    coal += [game.index_of(f"s{j + 1}") for j in cover]
    return Partition.with_coalition(coal, range(game.n))


def gen_rx3c_ir_pa_sym(inst: RX3C) -> tuple[AdditiveGame, int, int]:
    """IR/IS/NS with a pair goal and symmetric utilities; goal PA(x, e1)."""
    b = _Builder()
    n_hat = inst.n_hat
    m = 3 * n_hat
    x = b.agent("x")
    e = [b.agent(f"e{i}") for i in range(1, m + 1)]
    s = [b.agent(f"s{j}") for j in range(1, m + 1)]
    d = [b.agent(f"d{l}") for l in range(1, 2 * n_hat + 1)]
    for ei in e:
        b.both(x, ei, -3)
    for sj in s:
        b.both(x, sj, 9)
    for dl in d:
        b.both(x, dl, -9)
    for i in range(m):
        b.both(e[i], e[(i + 1) % m], 1)
    for j, trip in enumerate(inst.sets):
        for el in trip:
            b.both(s[j], e[el - 1], 1)
        for l in range(j + 1, m):
            if _intersect(inst, j, l):
                b.both(s[j], s[l], -13)
        for dl in d:
            b.both(s[j], dl, 1)
    for dl in d:
        for ei in e:
            b.both(dl, ei, -3)
    return b.game(), x, e[0]


def forward_rx3c_ir_pa_sym(game: AdditiveGame, inst: RX3C, cover: Sequence[int]) -> Partition:
    m = 3 * inst.n_hat
    main = [game.index_of("x")] + [game.index_of(f"e{i}") for i in range(1, m + 1)]
    main += [game.index_of(f"s{j + 1}") for j in cover]
    blocks = [main]
    rest = iter(range(1, 2 * inst.n_hat + 1))
    for j in range(m):
        if j not in cover:
            blocks.append([game.index_of(f"s{j + 1}"), game.index_of(f"d{next(rest)}")])
    return Partition(blocks)


def gen_setcover_fri_gr(sc: SetCover) -> tuple[FriendGame, int]:
    """Friend game whose grand coalition can be made stable by adding at most h set agents."""
    nu, ns = sc.universe, len(sc.sets)
    names = [f"u{i}" for i in range(1, nu + 1)] + [f"s{j}" for j in range(1, ns + 1)]
    arcs = []
    for j, S in enumerate(sc.sets):
        sj = nu + j
        for i in S:
            arcs += [(i - 1, sj), (sj, i - 1)]
        for l in range(ns):
            if l != j:
                arcs.append((sj, nu + l))
    fg = FriendGame.from_arcs(nu + ns, arcs, additional=range(nu, nu + ns), names=names)
    return fg, sc.h


def gen_setcover_add_gr(sc: SetCover, action: str, variant: str) -> tuple[AdditiveGame, int]:
    """Additive grand-coalition gadgets: (add, dag), (del, dag) and (del, sym)."""
    key = (action, variant)
    b = _Builder()
    nu, ns = sc.universe, len(sc.sets)
    u = [b.agent(f"u{i}") for i in range(1, nu + 1)]
    deg = {i: sum(1 for S in sc.sets if i in S) for i in range(1, nu + 1)}
    if key == ("add", "dag"):
        bb = b.agent("b")
        s = [b.agent(f"s{j}") for j in range(1, ns + 1)]
        for i in range(1, nu + 1):
            b.arc(u[i - 1], bb, -1)
        for j, S in enumerate(sc.sets):
            for i in S:
                b.arc(u[i - 1], s[j], 1)
        return b.game(additional=s), sc.h
    if key == ("del", "dag"):
        s = [b.agent(f"s{j}") for j in range(1, ns + 1)]
        for i in range(1, nu + 1):
            for z in range(1, deg[i]):
                b.arc(u[i - 1], b.agent(f"a{i}_{z}"), 1)
        for j, S in enumerate(sc.sets):
            for i in S:
                b.arc(u[i - 1], s[j], -1)
        return b.game(), sc.h
    if key == ("del", "sym"):
        s = [b.agent(f"s{j}") for j in range(1, ns + 1)]
        for i in range(1, nu + 1):
            for z in range(1, deg[i]):
                b.both(u[i - 1], b.agent(f"a{i}_{z}"), 1)
        for j, S in enumerate(sc.sets):
            for w in range(1, len(S) + ns + 1):
                b.both(s[j], b.agent(f"b{j + 1}_{w}"), 1)
            for i in S:
                b.both(u[i - 1], s[j], -1)
            for l in range(j + 1, ns):
                b.both(s[j], s[l], -1)
        return b.game(), sc.h
    raise ValueError(f"no set-cover gadget for action={action!r}, variant={variant!r}")


def gen_clique_cs_gr(n: int, edges: Sequence[tuple[int, int]], h: int) -> AdditiveGame:
    """Symmetric game whose grand coalition is core stable iff no clique of size h exists.

    Needs every vertex to have at least one non-neighbour.
    """
    adj = [set() for _ in range(n)]
    for a, c in edges:
        if a == c:
            raise InvalidGame("self-loop in clique graph")
        adj[a].add(c)
        adj[c].add(a)
    if any(len(adj[v]) >= n - 1 for v in range(n)):
        raise InvalidGame("every vertex needs a non-neighbour")
    b = _Builder()
    a = [b.agent(f"v{v}") for v in range(n)]
    bb = b.agent("b")
    for v in range(n):
        for w in range(v + 1, n):
            b.both(a[v], a[w], 1 if w in adj[v] else -n)
        deg = len(adj[v])
        b.both(a[v], bb, n * (n - deg - 1) - deg + h - 2)
    return b.game()


def gen_random(model: str, n: int, arc_density: float = 0.4, weight_range: tuple[int, int] = (-3, 3),
               symmetric: bool = False, dag: bool = False, split_fraction: float = 0.0,
               seed: int = 0):
    """Random game; a fraction of agents (never all) is marked additional."""
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    rank = {a: t for t, a in enumerate(order)}
    lo, hi = weight_range
    weights = [w for w in range(lo, hi + 1) if w != 0]
    arcs: dict[tuple[int, int], int] = {}
    for i in range(n):
        for j in range(n):
            if i == j or (i, j) in arcs:
                continue
            if dag and rank[i] > rank[j]:
                continue
            if symmetric and j < i:
                continue
            if symmetric and dag:
                continue         # only the empty digraph is both
            if rng.random() >= arc_density:
                continue
            w = rng.choice(weights) if model == "additive" else 1
            arcs[(i, j)] = w
            if symmetric and not dag:
                arcs[(j, i)] = w
    n_add = min(n - 1, int(round(split_fraction * n)))
    additional = rng.sample(range(n), n_add) if n_add > 0 else []
    if model == "additive":
        return AdditiveGame.from_arcs(n, [(i, j, w) for (i, j), w in arcs.items()], additional)
    if model == "friends":
        return FriendGame.from_arcs(n, list(arcs), additional)
    raise ValueError(f"unknown model {model!r}")
