"""Stability verifiers, goal checks and witness rewrites.

Every verifier judges a partition on the agents it covers; agents outside it
are absent. A verifier returns True or a falsy StabilityViolation naming the
first witness found in canonical agent order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from .core import (
    AdditiveGame, CapExceeded, ControlQuery, FriendGame, Game, Goal, GoalKind,
    InvalidPartition, Partition, SolveOutcome, Stability, Witness, friends_to_additive,
)
from .graphs import friend_sccs, reaching

DEFAULT_CS_CAP = 20


@dataclass(frozen=True)
class StabilityViolation:
    kind: str                 # deviating_agent | blocking_tuple | blocking_coalition
    agent: Optional[int]
    target: frozenset

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        members = ",".join(map(str, sorted(self.target)))
        if self.kind == "blocking_coalition":
            return f"blocking coalition {{{members}}}"
        if self.kind == "deviating_agent":
            return f"agent {self.agent} prefers to be alone"
        return f"agent {self.agent} prefers to join {{{members}}}"


Verdict = Union[bool, StabilityViolation]


def _labels(partition: Partition) -> dict[int, int]:
    return {a: t for t, b in enumerate(partition.blocks) for a in b}


def _options(game: Game, partition: Partition, i: int, label: dict[int, int]):
    """(own value, {coalition index: value of joining it}) for agent i.

    Coalitions absent from the dict are worth no more than being alone.
    """
    own_t = label[i]
    if isinstance(game, AdditiveGame):
        acc: dict[int, int] = {}
        for j, w in game.out[i].items():
            t = label.get(j)
            if t is not None:
                acc[t] = acc.get(t, 0) + w
        own = acc.pop(own_t, 0)
        return own, acc, 0
    fr = game.friends[i]
    cnt: dict[int, int] = {}
    for j in fr:
        t = label.get(j)
        if t is not None:
            cnt[t] = cnt.get(t, 0) + 1
    size = len(partition.blocks[own_t]) - 1
    f = cnt.pop(own_t, 0)
    own = (f, -(size - f))
    opts = {t: (c, -(len(partition.blocks[t]) - c)) for t, c in cnt.items()}
    return own, opts, (0, 0)


def _consents(game: Game, i: int, block) -> bool:
    if isinstance(game, AdditiveGame):
        col = game.into[i]
        return all(col.get(j, 0) >= 0 for j in block)
    return all(i in game.friends[j] for j in block)


def is_ir(game: Game, partition: Partition) -> Verdict:
    label = _labels(partition)
    for i in sorted(label):
        own, _, alone = _options(game, partition, i, label)
        if alone > own:
            return StabilityViolation("deviating_agent", i, frozenset())
    return True


def _deviation_check(game: Game, partition: Partition, consent: bool) -> Verdict:
    label = _labels(partition)
    for i in sorted(label):
        own, opts, alone = _options(game, partition, i, label)
        if alone > own:
            return StabilityViolation("deviating_agent", i, frozenset())
        for t in sorted(opts):
            if opts[t] > own:
                block = partition.blocks[t]
                if consent and not _consents(game, i, block):
                    continue
                return StabilityViolation("blocking_tuple", i, frozenset(block))
    return True


def is_ns(game: Game, partition: Partition) -> Verdict:
    return _deviation_check(game, partition, consent=False)


def is_is(game: Game, partition: Partition) -> Verdict:
    return _deviation_check(game, partition, consent=True)


def _search_blocking(rows: list[dict], agents: list[int], threshold: dict[int, int]):
    """Smallest, then lexicographically first, coalition where everyone beats its threshold."""
    cand = set(agents)
    # drop agents who cannot beat their threshold even with every positive partner
    changed = True
    while changed:
        changed = False
        for i in sorted(cand):
            best = sum(w for j, w in rows[i].items() if w > 0 and j in cand)
            if best <= threshold[i]:
                cand.discard(i)
                changed = True
    order = sorted(cand)
    m = len(order)
    if m == 0:
        return None
    pos = {a: t for t, a in enumerate(order)}
    # suffix_pos[i][t]: positive utility agent i can still collect from order[t:]
    suffix_pos = {}
    for i in order:
        s = [0] * (m + 1)
        row = rows[i]
        for t in range(m - 1, -1, -1):
            w = row.get(order[t], 0)
            s[t] = s[t + 1] + (w if w > 0 else 0)
        suffix_pos[i] = s

    def dfs(chosen: list[int], sums: dict[int, int], start: int, size: int):
        if len(chosen) == size:
            if all(sums[i] > threshold[i] for i in chosen):
                return list(chosen)
            return None
        need = size - len(chosen)
        for t in range(start, m - need + 1):
            a = order[t]
            row_a = rows[a]
            new_sums = {}
            ok = True
            for i in chosen:
                v = sums[i] + rows[i].get(a, 0)
                if v + suffix_pos[i][t + 1] <= threshold[i]:
                    ok = False
                    break
                new_sums[i] = v
            if not ok:
                continue
            va = sum(row_a.get(i, 0) for i in chosen)
            if va + suffix_pos[a][t + 1] <= threshold[a]:
                continue
            new_sums[a] = va
            chosen.append(a)
            hit = dfs(chosen, new_sums, t + 1, size)
            chosen.pop()
            if hit is not None:
                return hit
        return None

    for size in range(1, m + 1):
        hit = dfs([], {}, 0, size)
        if hit is not None:
            return frozenset(hit)
    return None


def _additive_rows(game: Game) -> list[dict]:
    if isinstance(game, FriendGame):
        game = friends_to_additive(game)
    return list(game.out)


def is_cs(game: Game, partition: Partition, search_budget: Optional[int] = None) -> Verdict:
    """Core stability by exhaustive blocking-coalition search.

    Friend games get a structural shortcut first: a coalition splitting into
    several strongly connected parts is blocked by a sink part, and a
    partition into the strongly connected components is always core stable.
    """
    cap = DEFAULT_CS_CAP if search_budget is None else search_budget
    agents = sorted(partition.agents)
    if isinstance(game, FriendGame):
        for block in partition.blocks:
            if len(block) > 1:
                inner = friend_sccs(game, block)
                if len(inner.components) > 1:
                    sinks = [t for t in range(len(inner.components))
                             if not any(a == t for a, _ in inner.dag)]
                    return StabilityViolation("blocking_coalition", None,
                                              frozenset(inner.components[sinks[0]]))
        whole = friend_sccs(game, agents)
        if set(map(frozenset, whole.components)) == set(partition.coalitions):
            return True
    if len(agents) > cap:
        raise CapExceeded(f"core check over {len(agents)} agents exceeds the cap of {cap}")
    rows = _additive_rows(game)
    label = _labels(partition)
    threshold = {}
    for i in agents:
        block = partition.blocks[label[i]]
        threshold[i] = sum(rows[i].get(j, 0) for j in block)
    present = set(agents)
    rows = [{j: w for j, w in r.items() if j in present} if k in present else {}
            for k, r in enumerate(rows)]
    hit = _search_blocking(rows, agents, threshold)
    if hit is None:
        return True
    return StabilityViolation("blocking_coalition", None, hit)


def is_stable(game: Game, partition: Partition, stability: Stability,
              search_budget: Optional[int] = None) -> Verdict:
    stability = Stability(stability)
    if stability is Stability.IR:
        return is_ir(game, partition)
    if stability is Stability.IS:
        return is_is(game, partition)
    if stability is Stability.NS:
        return is_ns(game, partition)
    return is_cs(game, partition, search_budget)


def goal_holds(partition: Partition, goal: Goal) -> bool:
    if goal.kind is GoalKind.GR:
        return len(partition.blocks) == 1
    if goal.x not in partition.agents:
        return False
    if goal.kind is GoalKind.NA:
        return len(partition.coalition_of(goal.x)) >= 2
    return partition.together(goal.x, goal.y)


def ir_to_is_friend(fg: FriendGame, partition: Partition, x: int, y: int) -> Partition:
    """Rewrite an IR partition with x and y together into an IS one keeping them together.

    Pool every non-singleton coalition, every strongly connected component
    with two or more agents, and every agent that can reach that pool; the
    remaining agents stay alone.
    """
    if not is_ir(fg, partition):
        raise InvalidPartition("input partition must be individually rational")
    if not partition.together(x, y):
        raise InvalidPartition("x and y must share a coalition")
    agents = partition.agents
    pool = {a for b in partition.blocks if len(b) > 1 for a in b}
    for comp in friend_sccs(fg, agents).components:
        if len(comp) > 1:
            pool.update(comp)
    pool = reaching(pool, agents, lambda v: fg.into[v])
    return Partition.with_coalition(pool, sorted(agents))


def na_via_pa(solver_pa: Callable[[ControlQuery], SolveOutcome], query: ControlQuery) -> SolveOutcome:
    """Answer NA(x) by trying PA(x, a) for every partner a and keeping the cheapest yes.

    An additional partner is first moved into the original set, which costs
    one unit of the budget for adding agents.
    """
    from .core import Action, Route

    if query.goal.kind is not GoalKind.NA:
        raise ValueError("na_via_pa answers NA goals")
    game, x, k = query.game, query.goal.x, query.budget
    best: Optional[tuple[int, SolveOutcome]] = None
    route = None
    partners = sorted(game.original) + sorted(game.additional)
    for a in partners:
        if a == x:
            continue
        if a in game.additional:
            if k == 0:
                continue
            sub_game = game.with_split(game.additional - {a})
            sub = ControlQuery(sub_game, query.stability, Goal.pa(x, a), query.action, k - 1)
            extra = {a}
        else:
            sub = ControlQuery(game, query.stability, Goal.pa(x, a), query.action, k)
            extra = set()
        out = solver_pa(sub)
        route = route or out.route
        if not out.decision:
            continue
        chosen = frozenset(out.witness.chosen | extra)
        if best is None or len(chosen) < best[0]:
            best = (len(chosen), SolveOutcome(True, out.route,
                                              Witness(query.action, chosen, out.witness.partition)))
            if best[0] == 0:
                break
    if best is None:
        return SolveOutcome(False, route or Route.POLY)
    return best[1]
