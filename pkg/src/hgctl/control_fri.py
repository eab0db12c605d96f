"""Control by adding or deleting agents in friend-oriented games."""
from __future__ import annotations

from itertools import combinations
from typing import Optional

import numpy as np

from .core import (
    Action, ControlQuery, FriendGame, GameClass, Goal, GoalKind, Partition, Route,
    SolveOutcome, Stability, Witness, classify_game, final_agents,
)
from .exact import oracle_control
from .graphs import (
    INF, all_pairs_min_paths, control_weights, friend_sccs, split_additional, two_scss,
)
from .stability import DEFAULT_CS_CAP, goal_holds, ir_to_is_friend, is_stable


def fri_route(stability: Stability, kind: GoalKind, action: Action, cls: GameClass) -> Route:
    if cls.is_dag:
        return Route.NEVER
    if kind is GoalKind.GR:
        return Route.XP if action is Action.ADD else Route.POLY
    if stability is Stability.NS and not cls.is_symmetric:
        return Route.EXACT
    return Route.POLY if action is Action.ADD else Route.IMMUNE


def _yes(action: Action, chosen, partition: Partition, route: Route) -> SolveOutcome:
    return SolveOutcome(True, route, Witness(action, frozenset(chosen), partition))


def _coalition_outcome(fg: FriendGame, coalition: set, route: Route) -> SolveOutcome:
    chosen = frozenset(coalition & fg.additional)
    agents = sorted(fg.original | chosen)
    return _yes(Action.ADD, chosen, Partition.with_coalition(coalition, agents), route)


def fri_addag_pa_ir(fg: FriendGame, x: int, y: int, k: int) -> SolveOutcome:
    """Fewest additions that let x and y share a coalition in an IR partition.

    Everyone in the shared coalition needs a friend inside it, so the coalition
    holds paths into cycles. Three shapes cover every minimal one: both agents
    reach a common cycle through y-hat; each reaches its own agent on a cycle
    formed by two crossing paths; or each reaches a separate cycle. Costs count
    additional agents on the chosen arcs, tails only.
    """
    t = all_pairs_min_paths(control_weights(fg))
    wP, wC = t.dist, t.cycle
    n = fg.n
    px, py = wP[x], wP[y]
    c1 = (px + py)[None, :] + wP.T + wC[:, None]          # [xh, yh]
    c2 = px[:, None] + py[None, :] + wP + wP.T
    c2[np.arange(n), np.arange(n)] = INF
    c3 = (px + wC)[:, None] + (py + wC)[None, :]
    best, shape = INF, 0
    for s, c in enumerate((c1, c2, c3), start=1):
        v = int(c.min())
        if v < best:
            best, shape = v, s
    if best >= INF or best > k:
        return SolveOutcome(False, Route.POLY)
    c = (c1, c2, c3)[shape - 1]
    xh, yh = map(int, np.unravel_index(int(np.argmin(c)), c.shape))
    coal: set[int] = set()
    if shape == 1:
        coal.update(t.path(x, yh), t.path(y, yh), t.path(yh, xh), t.cycle_through(xh))
    elif shape == 2:
        coal.update(t.path(x, xh), t.path(y, yh), t.path(xh, yh), t.path(yh, xh))
    else:
        coal.update(t.path(x, xh), t.path(y, yh), t.cycle_through(xh), t.cycle_through(yh))
    return _coalition_outcome(fg, coal, Route.POLY)


def fri_addag_na_ir(fg: FriendGame, x: int, k: int) -> SolveOutcome:
    """x is not alone iff it reaches a cycle; pay for the cheapest path plus cycle."""
    t = all_pairs_min_paths(control_weights(fg))
    cost = t.dist[x] + t.cycle
    i = int(np.argmin(cost))
    best = int(cost[i])
    if best >= INF or best > k:
        return SolveOutcome(False, Route.POLY)
    coal = set(t.path(x, i)) | set(t.cycle_through(i))
    return _coalition_outcome(fg, coal, Route.POLY)


def _scc_partition(fg: FriendGame, agents) -> Partition:
    return Partition(friend_sccs(fg, agents).components)


def fri_addag_cs(fg: FriendGame, goal: Goal, k: int) -> SolveOutcome:
    """Core stable partitions are unions of strongly connected pieces, so the
    goal reduces to a cheapest cycle (NA) or a cheapest strongly connected pair."""
    if goal.kind is GoalKind.NA:
        t = all_pairs_min_paths(control_weights(fg))
        best = int(t.cycle[goal.x])
        if best >= INF or best > k:
            return SolveOutcome(False, Route.POLY)
        chosen = frozenset(set(t.cycle_through(goal.x)) & fg.additional)
    else:
        sp = split_additional(fg)
        cost, arcs = two_scss(sp.graph, sp.exit[goal.x], sp.entry[goal.y])
        if cost >= INF or cost > k:
            return SolveOutcome(False, Route.POLY)
        used = set(arcs)
        chosen = frozenset(w for w in fg.additional if sp.agent_arc(w) in used)
    agents = fg.original | chosen
    return _yes(Action.ADD, chosen, _scc_partition(fg, agents), Route.POLY)


def _degree_partition(fg: FriendGame, agents) -> Partition:
    agents = set(agents)
    pool = {a for a in agents if fg.friends[a] & agents}
    return Partition.with_coalition(pool, sorted(agents)) if pool else Partition.singletons(sorted(agents))


def fri_addag_ns_sym(fg: FriendGame, goal: Goal, k: int) -> SolveOutcome:
    """Symmetric friendships: pooling every agent with a friend is NS, so each
    goal agent only needs one friend present."""
    U = fg.original
    need = [a for a in goal.agents if not (fg.friends[a] & U)]
    options = {a: sorted(fg.friends[a] & fg.additional) for a in need}
    chosen: Optional[set] = None
    if not need:
        chosen = set()
    elif len(need) == 1:
        if options[need[0]] and k >= 1:
            chosen = {options[need[0]][0]}
    else:
        common = sorted(set(options[need[0]]) & set(options[need[1]]))
        if common and k >= 1:
            chosen = {common[0]}
        elif options[need[0]] and options[need[1]] and k >= 2:
            chosen = {options[need[0]][0], options[need[1]][0]}
    if chosen is None:
        return SolveOutcome(False, Route.POLY)
    agents = U | chosen
    return _yes(Action.ADD, chosen, _degree_partition(fg, agents), Route.POLY)


def _everyone_has_friend(fg: FriendGame, agents: frozenset) -> bool:
    return all(fg.friends[a] & agents for a in agents)


def _strongly_connected(fg: FriendGame, agents: frozenset) -> bool:
    return len(friend_sccs(fg, agents).components) == 1


def fri_gr_addag(fg: FriendGame, stability: Stability, k: int) -> SolveOutcome:
    """Size-ascending scan over additions; first hit is the lexicographically least minimum."""
    test = _strongly_connected if stability is Stability.CS else _everyone_has_friend
    pool = sorted(fg.additional)
    for size in range(min(k, len(pool)) + 1):
        for chosen in combinations(pool, size):
            agents = fg.original | frozenset(chosen)
            if not agents:
                continue
            if len(agents) == 1 or test(fg, agents):
                route = Route.TRIVIAL if len(agents) == 1 else Route.XP
                return _yes(Action.ADD, chosen, Partition.grand(sorted(agents)), route)
    return SolveOutcome(False, Route.XP)


def fri_gr_delag(fg: FriendGame, stability: Stability, k: int) -> SolveOutcome:
    """Fewest deletions leaving a stable grand coalition; at least one agent stays."""
    U = sorted(fg.original)
    n = len(U)
    if stability is Stability.CS:
        comps = friend_sccs(fg, U).components
        size = max(len(c) for c in comps)
        keep = min((c for c in comps if len(c) == size),
                   key=lambda c: tuple(sorted(set(U) - set(c))))
        keep = set(keep)
    else:
        keep = set(U)
        changed = True
        while changed:
            changed = False
            for a in sorted(keep):
                if not (fg.friends[a] & keep):
                    keep.discard(a)
                    changed = True
        if not keep:
            keep = {U[-1]}
    deleted = set(U) - keep
    if len(deleted) > k:
        return SolveOutcome(False, Route.POLY)
    route = Route.TRIVIAL if len(keep) == 1 else Route.POLY
    return _yes(Action.DEL, deleted, Partition.grand(sorted(keep)), route)


def _never(query: ControlQuery) -> SolveOutcome:
    """Acyclic friendships: only single agents can form a stable coalition."""
    fg, k = query.game, query.budget
    if query.goal.kind is GoalKind.GR:
        U = sorted(fg.original)
        if query.action is Action.ADD and len(U) == 1:
            return _yes(Action.ADD, (), Partition.grand(U), Route.TRIVIAL)
        if query.action is Action.DEL and len(U) >= 2 and k >= len(U) - 1:
            return _yes(Action.DEL, U[:-1], Partition.grand(U[-1:]), Route.TRIVIAL)
        if query.action is Action.DEL and len(U) == 1:
            return _yes(Action.DEL, (), Partition.grand(U), Route.TRIVIAL)
    return SolveOutcome(False, Route.NEVER)


def _ir_or_is(fg: FriendGame, query: ControlQuery, out: SolveOutcome) -> SolveOutcome:
    if not out.decision or query.stability is not Stability.IS:
        return out
    x = query.goal.x
    y = query.goal.y if query.goal.y is not None else x
    p = ir_to_is_friend(fg, out.witness.partition, x, y)
    return SolveOutcome(True, out.route, Witness(out.witness.action, out.witness.chosen, p))


def _addag_goal(fg: FriendGame, query: ControlQuery, k: int) -> SolveOutcome:
    """NA/PA under additions with budget k, for IR, IS, CS and symmetric NS."""
    goal, stab = query.goal, query.stability
    if stab is Stability.CS:
        return fri_addag_cs(fg, goal, k)
    if stab is Stability.NS:
        return fri_addag_ns_sym(fg, goal, k)
    if goal.kind is GoalKind.NA:
        out = fri_addag_na_ir(fg, goal.x, k)
    else:
        out = fri_addag_pa_ir(fg, goal.x, goal.y, k)
    return _ir_or_is(fg, query, out)


def _immune(query: ControlQuery) -> SolveOutcome:
    """Deleting agents never helps here, so the answer is the answer with no deletions."""
    out = _addag_goal(query.game, query, 0)
    if not out.decision:
        return SolveOutcome(False, Route.IMMUNE)
    return SolveOutcome(True, Route.IMMUNE,
                        Witness(Action.DEL, frozenset(), out.witness.partition))


def solve_fri(query: ControlQuery) -> SolveOutcome:
    fg = query.game
    if not isinstance(fg, FriendGame):
        raise TypeError("solve_fri expects a friend-oriented game")
    route = fri_route(query.stability, query.goal.kind, query.action, classify_game(fg))
    if route is Route.NEVER:
        out = _never(query)
    elif route is Route.EXACT:
        out = oracle_control(query)
    elif query.goal.kind is GoalKind.GR:
        if query.action is Action.ADD:
            out = fri_gr_addag(fg, query.stability, query.budget)
        else:
            out = fri_gr_delag(fg, query.stability, query.budget)
    elif route is Route.IMMUNE:
        out = _immune(query)
    else:
        out = _addag_goal(fg, query, query.budget)
    return certify(query, out)


def certify(query: ControlQuery, out: SolveOutcome) -> SolveOutcome:
    """Re-check a yes answer against the verifiers; a failure is a solver bug."""
    if not out.decision:
        return out
    w = out.witness
    agents = final_agents(query, w.chosen)
    if len(w.chosen) > query.budget:
        raise AssertionError(f"witness uses {len(w.chosen)} > budget {query.budget}")
    if w.partition.agents != agents:
        raise AssertionError("witness partition does not cover the controlled agent set")
    if not goal_holds(w.partition, query.goal):
        raise AssertionError("witness partition misses the goal")
    if query.stability is not Stability.CS or len(agents) <= DEFAULT_CS_CAP:
        if not is_stable(query.game, w.partition, query.stability):
            raise AssertionError("witness partition is not stable")
    return out
