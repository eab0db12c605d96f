"""Exhaustive search: partition enumeration, stable-partition search, control oracle."""
from __future__ import annotations

import os
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .core import (
    Action, AdditiveGame, CapExceeded, ControlQuery, FriendGame, Game, Goal, GoalKind,
    Partition, Route, SolveOutcome, Stability, Witness, final_agents, friends_to_additive,
)
from .stability import DEFAULT_CS_CAP, is_stable

PARTITION_CAP = 12
DEFAULT_AGENT_CAP = 16
TABLE_LIMIT = 10        # agent sets up to this size are scanned with dense tables
CS_TABLE_LIMIT = 9
IR_SEARCH_CAP = 40      # single-coalition search used for IR with NA/PA goals


def agent_cap() -> int:
    """Largest agent set the exact solver will search (HGCTL_EXACT_CAP overrides)."""
    raw = os.environ.get("HGCTL_EXACT_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_AGENT_CAP


def enumerate_partitions(agents: Iterable[int], cap: int = PARTITION_CAP) -> Iterator[Partition]:
    """Every set partition of `agents` once, in restricted-growth-string order."""
    agents = sorted(set(agents))
    m = len(agents)
    if m > cap:
        raise CapExceeded(f"{m} agents exceeds the enumeration cap of {cap}")
    if m == 0:
        yield Partition([])
        return
    rgs = [0] * m
    top = [0] * m          # top[t] = max(rgs[:t + 1])
    while True:
        blocks: list[list[int]] = [[] for _ in range(top[-1] + 1)]
        for a, lab in zip(agents, rgs):
            blocks[lab].append(a)
        yield Partition(blocks)
        t = m - 1
        while t > 0 and rgs[t] > top[t - 1]:
            t -= 1
        if t == 0:
            return
        rgs[t] += 1
        top[t] = max(top[t - 1], rgs[t])
        for s in range(t + 1, m):
            rgs[s] = 0
            top[s] = top[t]


@lru_cache(maxsize=None)
def _rgs_table(m: int) -> np.ndarray:
    rows = []
    for p in enumerate_partitions(range(m), cap=TABLE_LIMIT):
        lab = [0] * m
        for t, b in enumerate(p.blocks):
            for a in b:
                lab[a] = t
        rows.append(lab)
    out = np.array(rows, dtype=np.int64).reshape(len(rows), m)
    out.setflags(write=False)
    return out


def _utility_matrix(game: Game) -> np.ndarray:
    if isinstance(game, FriendGame):
        game = friends_to_additive(game)
    return game.matrix


class StableSet:
    """All stable partitions of one agent set, held as a boolean mask over a label table."""

    def __init__(self, game: Game, agents: Sequence[int], stability: Stability):
        self.agents = tuple(sorted(agents))
        m = len(self.agents)
        if m > TABLE_LIMIT or (stability is Stability.CS and m > CS_TABLE_LIMIT):
            raise CapExceeded("agent set too large for the dense scan")
        self.stability = stability
        full = _utility_matrix(game)
        idx = np.array(self.agents, dtype=np.int64)
        u = full[np.ix_(idx, idx)] if m else np.zeros((0, 0), dtype=np.int64)
        labels = _rgs_table(m)
        self.labels = labels
        P = labels.shape[0]
        bits = (1 << np.arange(m, dtype=np.int64))
        # value table: val[T, i] = sum of u[i, j] over j in bitmask T
        val = np.zeros((1 << m, m), dtype=np.int64)
        for b in range(m):
            val[1 << b: 1 << (b + 1)] = val[: 1 << b] + u[:, b][None, :]
        lm = np.zeros((P, m), dtype=np.int64)           # coalition mask per label
        for lab in range(m):
            lm[:, lab] = ((labels == lab) * bits[None, :]).sum(axis=1)
        own = np.take_along_axis(lm, labels, axis=1)     # own mask per agent
        cols = np.arange(m)
        own_val = val[own, cols[None, :]]
        ok = (own_val >= 0).all(axis=1)
        if stability in (Stability.NS, Stability.IS) and m:
            if stability is Stability.IS:
                cons = np.ones((1 << m, m), dtype=bool)
                nonneg = u >= 0                          # nonneg[j, i]: j accepts i
                for b in range(m):
                    cons[1 << b: 1 << (b + 1)] = cons[: 1 << b] & nonneg[b, :][None, :]
            for lab in range(m):
                target = lm[:, lab][:, None] | bits[None, :]
                dev = val[target, cols[None, :]] > own_val
                if stability is Stability.IS:
                    dev &= cons[lm[:, lab][:, None], cols[None, :]]
                ok &= ~dev.any(axis=1)
        elif stability is Stability.CS and m:
            member = ((np.arange(1 << m)[:, None] >> cols[None, :]) & 1).astype(bool)
            blocked = np.zeros(P, dtype=bool)
            chunk = max(1, 200000 // (1 << m))
            for s in range(0, P, chunk):
                ov = own_val[s:s + chunk]
                beats = (val[None, 1:, :] > ov[:, None, :]) | ~member[None, 1:, :]
                blocked[s:s + chunk] = beats.all(axis=2).any(axis=1)
            ok &= ~blocked
        self.ok = ok

    def _partition(self, row: int) -> Partition:
        lab = self.labels[row]
        blocks: dict[int, list[int]] = {}
        for a, t in zip(self.agents, lab):
            blocks.setdefault(int(t), []).append(a)
        return Partition(blocks.values())

    def find(self, goal: Goal) -> Optional[Partition]:
        mask = self.ok
        if goal.kind is GoalKind.GR:
            mask = mask & (self.labels.max(axis=1) == 0) if self.agents else mask
        else:
            if goal.x not in self.agents:
                return None
            px = self.agents.index(goal.x)
            if goal.kind is GoalKind.NA:
                same = (self.labels == self.labels[:, px:px + 1]).sum(axis=1) >= 2
            else:
                if goal.y not in self.agents:
                    return None
                py = self.agents.index(goal.y)
                same = self.labels[:, px] == self.labels[:, py]
            mask = mask & same
        hits = np.flatnonzero(mask)
        if hits.size == 0:
            return None
        return self._partition(int(hits[0]))


def _ir_goal_search(game: Game, agents: Sequence[int], goal: Goal) -> Optional[Partition]:
    """IR with NA/PA: look for one IR coalition holding the goal agents; others stay alone."""
    u = _utility_matrix(game)
    agents = sorted(agents)
    seed = list(goal.agents)
    if any(a not in agents for a in seed):
        return None
    rest = [a for a in agents if a not in seed]
    # agents sharing a positive utility with the seed first, for early hits
    rest.sort(key=lambda a: (-(int(u[seed, a].clip(0).sum()) + int(u[a, seed].clip(0).sum())), a))
    pos = np.clip(u, 0, None)

    def dfs(members: list[int], t: int) -> Optional[list[int]]:
        sums = u[np.ix_(members, members)].sum(axis=1)
        undecided = rest[t:]
        if undecided:
            room = pos[np.ix_(members, undecided)].sum(axis=1)
        else:
            room = np.zeros(len(members), dtype=np.int64)
        if (sums + room < 0).any():
            return None
        if (sums >= 0).all() and len(members) >= 2:
            return members
        if t == len(rest):
            return None
        a = rest[t]
        hit = dfs(members + [a], t + 1)
        if hit is not None:
            return hit
        return dfs(members, t + 1)

    found = dfs(seed, 0)
    if found is None:
        return None
    return Partition.with_coalition(found, agents)


def _dfs_search(game: Game, agents: Sequence[int], stability: Stability,
                goal: Goal) -> Optional[Partition]:
    """Branch-and-bound over coalition assignments, full verification at the leaves."""
    u = _utility_matrix(game)
    agents = list(agents)
    goal_agents = list(goal.agents)
    deg = {a: int((u[a, agents] != 0).sum() + (u[agents, a] != 0).sum()) for a in agents}
    order = goal_agents + sorted((a for a in agents if a not in goal_agents),
                                 key=lambda a: (-deg[a], a))
    m = len(order)
    index = {a: t for t, a in enumerate(order)}
    U = u[np.ix_(order, order)].astype(np.int64)
    pos_left = np.clip(U, 0, None).sum(axis=1)     # positive utility to unassigned agents
    neg_left = np.clip(U, None, 0).sum(axis=1)
    vetoers_left = (U < 0).sum(axis=0)             # unassigned agents that dislike column agent
    check = stability in (Stability.NS, Stability.IS)
    coal_sum = np.zeros((m, m), dtype=np.int64)    # coal_sum[i, c]: i's utility toward coalition c
    assign = [-1] * m
    sizes: list[int] = []
    vetoed = np.zeros((m, m), dtype=bool)          # vetoed[c, i]: some member of c dislikes i
    px = 0
    py = 1 if goal.kind is GoalKind.PA else None

    def feasible(upto: int) -> bool:
        for i in range(upto):
            c = assign[i]
            upper = coal_sum[i, c] + pos_left[i]
            if upper < 0:
                return False
            if check:
                lower_alt = coal_sum[i, : len(sizes)] + neg_left[i]
                lower_alt[c] = np.iinfo(np.int64).min
                if stability is Stability.IS:
                    if vetoers_left[i] > 0:
                        continue
                    lower_alt = np.where(vetoed[: len(sizes), i], np.iinfo(np.int64).min, lower_alt)
                if (lower_alt > upper).any():
                    return False
        return True

    result: list[Optional[Partition]] = [None]

    def leaf() -> bool:
        if goal.kind is GoalKind.NA and sizes[assign[px]] < 2:
            return False
        blocks: dict[int, list[int]] = {}
        for t, c in enumerate(assign):
            blocks.setdefault(c, []).append(order[t])
        p = Partition(blocks.values())
        if is_stable(game, p, stability, search_budget=max(DEFAULT_CS_CAP, m)):
            result[0] = p
            return True
        return False

    def place(t: int) -> bool:
        if t == m:
            return leaf()
        if py is not None and t == py:
            choices = [assign[px]]
        else:
            choices = sorted(range(len(sizes)), key=lambda c: -coal_sum[t, c]) + [len(sizes)]
        for c in choices:
            if c == len(sizes):
                sizes.append(0)
            assign[t] = c
            sizes[c] += 1
            coal_sum[:, c] += U[:, t]
            pos_left[:] -= np.clip(U[:, t], 0, None)
            neg_left[:] -= np.clip(U[:, t], None, 0)
            vetoers_left[:] -= (U[t, :] < 0)
            old_veto = vetoed[c].copy()
            vetoed[c] |= U[t, :] < 0
            if feasible(t + 1) and place(t + 1):
                return True
            vetoed[c] = old_veto
            vetoers_left[:] += (U[t, :] < 0)
            neg_left[:] += np.clip(U[:, t], None, 0)
            pos_left[:] += np.clip(U[:, t], 0, None)
            coal_sum[:, c] -= U[:, t]
            sizes[c] -= 1
            assign[t] = -1
            if sizes[c] == 0:
                sizes.pop()
        return False

    place(0)
    return result[0]


def exists_stable_goal(game: Game, stability: Stability, goal: Goal,
                       agents: Optional[Iterable[int]] = None,
                       cache: Optional[dict] = None) -> Optional[Partition]:
    """A stable partition of `agents` meeting the goal, or None when there is none."""
    stability = Stability(stability)
    agents = tuple(sorted(set(range(game.n) if agents is None else agents)))
    if not agents:
        return None
    if goal.kind is GoalKind.GR:
        grand = Partition.grand(agents)
        return grand if is_stable(game, grand, stability, search_budget=agent_cap()) else None
    if any(a not in agents for a in goal.agents):
        return None
    if stability is Stability.IR and len(agents) > TABLE_LIMIT:
        if len(agents) > IR_SEARCH_CAP:
            raise CapExceeded(f"{len(agents)} agents exceeds the IR search cap of {IR_SEARCH_CAP}")
        return _ir_goal_search(game, agents, goal)
    if len(agents) > agent_cap():
        raise CapExceeded(f"{len(agents)} agents exceeds the exact cap of {agent_cap()}")
    table_ok = len(agents) <= (CS_TABLE_LIMIT if stability is Stability.CS else TABLE_LIMIT)
    if table_ok:
        key = (stability, agents)
        if cache is not None and key in cache:
            table = cache[key]
        else:
            table = StableSet(game, agents, stability)
            if cache is not None:
                cache[key] = table
        return table.find(goal)
    return _dfs_search(game, agents, stability, goal)


def control_pool(query: ControlQuery) -> list[int]:
    game = query.game
    if query.action is Action.ADD:
        return sorted(game.additional)
    protected = set(query.goal.agents)
    return [a for a in sorted(game.original) if a not in protected]


def oracle_control(query: ControlQuery, cache: Optional[dict] = None) -> SolveOutcome:
    """Try control sets in order of size, then lexicographically; the first hit is minimal."""
    pool = control_pool(query)
    for size in range(min(query.budget, len(pool)) + 1):
        for chosen in combinations(pool, size):
            agents = final_agents(query, chosen)
            if not agents:
                continue
            p = exists_stable_goal(query.game, query.stability, query.goal, agents, cache)
            if p is not None:
                return SolveOutcome(True, Route.EXACT, Witness(query.action, frozenset(chosen), p))
    return SolveOutcome(False, Route.EXACT)


solve_exact = oracle_control
