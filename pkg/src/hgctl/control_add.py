"""Control by adding or deleting agents in additively separable games."""
from __future__ import annotations

from itertools import combinations
from typing import Optional

import numpy as np

from .core import (
    Action, AdditiveGame, CapExceeded, ControlQuery, GameClass, Goal, GoalKind, Partition,
    Route, SolveOutcome, Stability, Witness, classify_game,
)
from .control_fri import certify
from .exact import agent_cap, exists_stable_goal, oracle_control
from .stability import is_cs


def add_route(stability: Stability, kind: GoalKind, action: Action, cls: GameClass) -> Route:
    if kind is GoalKind.GR:
        if stability is Stability.CS and not cls.is_dag:
            return Route.EXACT
        return Route.XP
    if stability is Stability.IR:
        if action is Action.DEL:
            return Route.IMMUNE
        if kind is GoalKind.NA and (cls.is_dag or cls.is_symmetric):
            return Route.POLY
        return Route.EXACT
    if stability is Stability.CS and cls.is_dag:
        if action is Action.DEL:
            return Route.IMMUNE
        return Route.POLY if kind is GoalKind.NA else Route.EXACT
    return Route.EXACT


def add_ir_na_special(game: AdditiveGame, x: int, k: int) -> SolveOutcome:
    """Acyclic or symmetric utilities: x can be paired with anyone both ways non-negative.

    On these classes a pair {x, a} with u_x(a) >= 0 and u_a(x) >= 0 exists
    whenever x can be in any IR coalition, so at most one addition is needed.
    Original partners are preferred.
    """
    best: Optional[int] = None
    for a in range(game.n):
        if a == x or game.u(x, a) < 0 or game.u(a, x) < 0:
            continue
        if a in game.original:
            best = a
            break
        if best is None and k >= 1:
            best = a
    if best is None:
        return SolveOutcome(False, Route.POLY)
    chosen = frozenset({best}) & game.additional
    agents = sorted(game.original | chosen)
    return SolveOutcome(True, Route.POLY,
                        Witness(Action.ADD, chosen, Partition.with_coalition({x, best}, agents)))


def _first_min_fix(game: AdditiveGame, action: Action, k: int) -> Optional[frozenset]:
    """Fewest additions/deletions making the grand coalition IR.

    Branches on the smallest current violator v: a deletion removes v or an
    agent v dislikes, an addition brings in an agent v likes. Every minimum
    solution shows up at the first depth where any does, and the
    lexicographically least of them is returned.
    """
    M = game.matrix
    n = game.n
    active0 = np.zeros(n, dtype=bool)
    active0[list(game.original)] = True
    pool = set(game.additional) if action is Action.ADD else set(game.original)

    def sums_for(active: np.ndarray) -> np.ndarray:
        return M[:, active].sum(axis=1)

    for depth in range(k + 1):
        found: list[tuple[int, ...]] = []
        seen: set[frozenset] = set()

        def dfs(chosen: tuple[int, ...], active: np.ndarray, sums: np.ndarray):
            key = frozenset(chosen)
            if key in seen:
                return
            seen.add(key)
            bad = np.flatnonzero(active & (sums < 0))
            if bad.size == 0:
                if len(chosen) == depth and active.any():
                    found.append(tuple(sorted(chosen)))
                return
            if len(chosen) == depth:
                return
            v = int(bad[0])
            if action is Action.DEL:
                cands = [v] + [int(d) for d in np.flatnonzero(active & (M[v] < 0))]
            else:
                cands = [int(w) for w in np.flatnonzero(~active & (M[v] > 0)) if int(w) in pool]
            for c in sorted(set(cands)):
                if action is Action.DEL and c not in pool:
                    continue
                nxt = active.copy()
                nxt[c] = action is Action.ADD
                if not nxt.any():
                    continue
                dfs(chosen + (c,), nxt, sums + (M[:, c] if action is Action.ADD else -M[:, c]))

        dfs((), active0, sums_for(active0))
        if found:
            return frozenset(min(found))
    return None


def add_gr(game: AdditiveGame, stability: Stability, action: Action, k: int,
           is_dag: Optional[bool] = None) -> SolveOutcome:
    """Grand coalition goal: the least control set, by size then lexicographically.

    A grand coalition has no other coalition to move to, so IR, IS and NS
    coincide; core stability equals IR on acyclic utilities and needs the
    blocking-coalition search otherwise.
    """
    stability = Stability(stability)
    if is_dag is None:
        is_dag = classify_game(game).is_dag
    if stability is not Stability.CS or is_dag:
        chosen = _first_min_fix(game, action, k)
        if chosen is None:
            return SolveOutcome(False, Route.XP)
        return _gr_outcome(game, action, chosen, Route.XP)
    pool = sorted(game.additional if action is Action.ADD else game.original)
    M = game.matrix
    for size in range(min(k, len(pool)) + 1):
        for chosen in combinations(pool, size):
            if action is Action.ADD:
                agents = sorted(game.original | set(chosen))
            else:
                agents = sorted(game.original - set(chosen))
            if not agents:
                continue
            if (M[np.ix_(agents, agents)].sum(axis=1) < 0).any():
                continue
            if len(agents) > agent_cap():
                raise CapExceeded(f"core check over {len(agents)} agents exceeds the exact cap")
            if is_cs(game, Partition.grand(agents), search_budget=agent_cap()):
                return _gr_outcome(game, action, frozenset(chosen), Route.EXACT)
    return SolveOutcome(False, Route.EXACT)


def _gr_outcome(game: AdditiveGame, action: Action, chosen: frozenset, route: Route) -> SolveOutcome:
    if action is Action.ADD:
        agents = game.original | chosen
    else:
        agents = game.original - chosen
    if len(agents) == 1:
        route = Route.TRIVIAL
    return SolveOutcome(True, route, Witness(action, chosen, Partition.grand(sorted(agents))))


def add_delag_ir_immune(game: AdditiveGame, goal: Goal, cls: Optional[GameClass] = None) -> SolveOutcome:
    """Deleting agents never creates an IR coalition for NA/PA, so decide with no deletions."""
    if cls is None:
        cls = classify_game(game)
    if goal.kind is GoalKind.NA and (cls.is_dag or cls.is_symmetric):
        p = add_ir_na_special(game, goal.x, 0)
        part = p.witness.partition if p.decision else None
    else:
        part = exists_stable_goal(game, Stability.IR, goal, sorted(game.original))
    if part is None:
        return SolveOutcome(False, Route.IMMUNE)
    return SolveOutcome(True, Route.IMMUNE, Witness(Action.DEL, frozenset(), part))


def solve_add(query: ControlQuery) -> SolveOutcome:
    game = query.game
    if not isinstance(game, AdditiveGame):
        raise TypeError("solve_add expects an additively separable game")
    cls = classify_game(game)
    route = add_route(query.stability, query.goal.kind, query.action, cls)
    goal = query.goal
    if goal.kind is GoalKind.GR:
        out = add_gr(game, query.stability, query.action, query.budget, cls.is_dag)
    elif route is Route.POLY:
        out = add_ir_na_special(game, goal.x, query.budget)
    elif route is Route.IMMUNE:
        out = add_delag_ir_immune(game, goal, cls)
    else:
        inner = query
        if query.stability is Stability.CS and cls.is_dag:
            # on acyclic utilities core stability and IR coincide
            inner = ControlQuery(game, Stability.IR, goal, query.action, query.budget)
        out = oracle_control(inner)
    return certify(query, out)
