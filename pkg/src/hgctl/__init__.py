"""Control of hedonic games by adding or deleting agents."""
from .core import (
    Action, AdditiveGame, CapExceeded, ControlQuery, FriendGame, Goal, GoalKind, HgctlError,
    Partition, Route, SolveOutcome, Stability, Witness, classify_game, friends_to_additive, prefers,
)
from .control_add import solve_add
from .control_fri import solve_fri
from .exact import exists_stable_goal, oracle_control
from .stability import goal_holds, is_cs, is_ir, is_is, is_ns, is_stable

__version__ = "0.1.0"


def solve(query: ControlQuery) -> SolveOutcome:
    """Route a control query to the solver for its game model."""
    if isinstance(query.game, FriendGame):
        return solve_fri(query)
    return solve_add(query)


__all__ = [
    "Action", "AdditiveGame", "CapExceeded", "ControlQuery", "FriendGame", "Goal", "GoalKind",
    "HgctlError", "Partition", "Route", "SolveOutcome", "Stability", "Witness", "classify_game",
    "exists_stable_goal", "friends_to_additive", "goal_holds", "is_cs", "is_ir", "is_is", "is_ns",
    "is_stable", "oracle_control", "prefers", "solve", "solve_add", "solve_fri",
]
