"""Games, partitions and control queries shared by every solver."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np


class HgctlError(Exception):
    """Base class for input errors raised by the library."""


class InvalidGame(HgctlError):
    pass


class InvalidPartition(HgctlError):
    pass


class InvalidQuery(HgctlError):
    pass


class CapExceeded(HgctlError):
    """An exhaustive routine was asked to go beyond its agent cap."""


class Stability(str, enum.Enum):
    IR = "IR"
    IS = "IS"
    NS = "NS"
    CS = "CS"


class Action(str, enum.Enum):
    ADD = "add"
    DEL = "del"


class GoalKind(str, enum.Enum):
    NA = "NA"
    PA = "PA"
    GR = "GR"


class Route(str, enum.Enum):
    POLY = "poly"
    XP = "xp"
    EXACT = "exact"
    IMMUNE = "immune"
    NEVER = "never"
    TRIVIAL = "trivial"


class Preference(enum.IntEnum):
    SECOND = -1
    INDIFFERENT = 0
    FIRST = 1


@dataclass(frozen=True)
class Goal:
    kind: GoalKind
    x: Optional[int] = None
    y: Optional[int] = None

    def __post_init__(self):
        if self.kind is GoalKind.GR:
            if self.x is not None or self.y is not None:
                raise InvalidQuery("GR takes no agents")
        elif self.kind is GoalKind.NA:
            if self.x is None or self.y is not None:
                raise InvalidQuery("NA takes exactly one agent")
        else:
            if self.x is None or self.y is None:
                raise InvalidQuery("PA takes two agents")
            if self.x == self.y:
                raise InvalidQuery("PA needs two distinct agents")

    @classmethod
    def na(cls, x: int) -> "Goal":
        return cls(GoalKind.NA, x)

    @classmethod
    def pa(cls, x: int, y: int) -> "Goal":
        return cls(GoalKind.PA, x, y)

    @classmethod
    def gr(cls) -> "Goal":
        return cls(GoalKind.GR)

    @property
    def agents(self) -> tuple[int, ...]:
        return tuple(a for a in (self.x, self.y) if a is not None)

    def __str__(self) -> str:
        if self.kind is GoalKind.GR:
            return "GR"
        return f"{self.kind.value}({','.join(map(str, self.agents))})"


def _default_names(n: int) -> tuple[str, ...]:
    return tuple(f"a{i}" for i in range(n))


def _check_split(n: int, original, additional) -> tuple[frozenset, frozenset]:
    additional = frozenset(additional)
    if original is None:
        original = frozenset(range(n)) - additional
    original = frozenset(original)
    if original & additional:
        raise InvalidGame("an agent cannot be both original and additional")
    if original | additional != frozenset(range(n)):
        raise InvalidGame("original and additional agents must cover 0..n-1")
    return original, additional


class _GameMixin:
    n: int
    original: frozenset
    additional: frozenset
    names: tuple

    @property
    def agents(self) -> range:
        return range(self.n)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvalidGame(f"unknown agent {name!r}") from None


@dataclass(frozen=True)
class AdditiveGame(_GameMixin):
    """Additively separable game; `utilities[(i, j)]` is u_i(j), zeros omitted."""

    n: int
    utilities: Mapping[tuple[int, int], int]
    original: frozenset
    additional: frozenset = frozenset()
    names: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise InvalidGame("a game needs at least one agent")
        clean = {}
        for (i, j), w in dict(self.utilities).items():
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidGame(f"utility ({i}, {j}) refers to an unknown agent")
            if i == j:
                raise InvalidGame(f"self-utility on agent {i}")
            if int(w) != w:
                raise InvalidGame(f"utility ({i}, {j}) is not an integer")
            if w != 0:
                clean[(int(i), int(j))] = int(w)
        object.__setattr__(self, "utilities", MappingProxyType(clean))
        original, additional = _check_split(self.n, self.original, self.additional)
        object.__setattr__(self, "original", original)
        object.__setattr__(self, "additional", additional)
        names = tuple(self.names) or _default_names(self.n)
        if len(names) != self.n or len(set(names)) != self.n:
            raise InvalidGame("agent names must be unique, one per agent")
        object.__setattr__(self, "names", names)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int, int]],
                  additional: Iterable[int] = (), names: Sequence[str] = ()) -> "AdditiveGame":
        utils: dict[tuple[int, int], int] = {}
        for i, j, w in arcs:
            if (i, j) in utils:
                raise InvalidGame(f"duplicate arc ({i}, {j})")
            utils[(i, j)] = w
        return cls(n, utils, None, frozenset(additional), tuple(names))

    def u(self, i: int, j: int) -> int:
        return self.utilities.get((i, j), 0)

    @cached_property
    def out(self) -> tuple[dict, ...]:
        rows: list[dict] = [dict() for _ in range(self.n)]
        for (i, j), w in self.utilities.items():
            rows[i][j] = w
        return tuple(rows)

    @cached_property
    def into(self) -> tuple[dict, ...]:
        cols: list[dict] = [dict() for _ in range(self.n)]
        for (i, j), w in self.utilities.items():
            cols[j][i] = w
        return tuple(cols)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=np.int64)
        for (i, j), w in self.utilities.items():
            m[i, j] = w
        m.setflags(write=False)
        return m

    def arcs(self) -> Iterator[tuple[int, int]]:
        return iter(self.utilities)

    def with_split(self, additional: Iterable[int]) -> "AdditiveGame":
        return AdditiveGame(self.n, dict(self.utilities), None, frozenset(additional), self.names)

    def restrict(self, keep: Iterable[int]) -> "AdditiveGame":
        """Sub-game on `keep`, reindexed in ascending order."""
        keep = sorted(set(keep))
        pos = {a: t for t, a in enumerate(keep)}
        utils = {(pos[i], pos[j]): w for (i, j), w in self.utilities.items()
                 if i in pos and j in pos}
        return AdditiveGame(len(keep), utils, None,
                            frozenset(pos[a] for a in keep if a in self.additional),
                            tuple(self.names[a] for a in keep))


@dataclass(frozen=True)
class FriendGame(_GameMixin):
    """Friend-oriented game; `friends[i]` is the friend set of agent i."""

    n: int
    friends: tuple
    original: frozenset
    additional: frozenset = frozenset()
    names: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise InvalidGame("a game needs at least one agent")
        fr = tuple(frozenset(f) for f in self.friends)
        if len(fr) != self.n:
            raise InvalidGame("one friend set per agent")
        for i, f in enumerate(fr):
            if i in f:
                raise InvalidGame(f"agent {i} lists itself as a friend")
            if any(not (0 <= j < self.n) for j in f):
                raise InvalidGame(f"agent {i} has a friend outside the game")
        object.__setattr__(self, "friends", fr)
        original, additional = _check_split(self.n, self.original, self.additional)
        object.__setattr__(self, "original", original)
        object.__setattr__(self, "additional", additional)
        names = tuple(self.names) or _default_names(self.n)
        if len(names) != self.n or len(set(names)) != self.n:
            raise InvalidGame("agent names must be unique, one per agent")
        object.__setattr__(self, "names", names)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]],
                  additional: Iterable[int] = (), names: Sequence[str] = ()) -> "FriendGame":
        fr: list[set] = [set() for _ in range(n)]
        for i, j in arcs:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidGame(f"arc ({i}, {j}) refers to an unknown agent")
            fr[i].add(j)
        return cls(n, tuple(fr), None, frozenset(additional), tuple(names))

    def is_friend(self, i: int, j: int) -> bool:
        return j in self.friends[i]

    @cached_property
    def into(self) -> tuple[frozenset, ...]:
        cols: list[set] = [set() for _ in range(self.n)]
        for i, f in enumerate(self.friends):
            for j in f:
                cols[j].add(i)
        return tuple(frozenset(c) for c in cols)

    def arcs(self) -> Iterator[tuple[int, int]]:
        for i, f in enumerate(self.friends):
            for j in sorted(f):
                yield (i, j)

    def with_split(self, additional: Iterable[int]) -> "FriendGame":
        return FriendGame(self.n, self.friends, None, frozenset(additional), self.names)

    def restrict(self, keep: Iterable[int]) -> "FriendGame":
        keep = sorted(set(keep))
        pos = {a: t for t, a in enumerate(keep)}
        fr = tuple(frozenset(pos[j] for j in self.friends[a] if j in pos) for a in keep)
        return FriendGame(len(keep), fr, None,
                          frozenset(pos[a] for a in keep if a in self.additional),
                          tuple(self.names[a] for a in keep))


Game = Union[AdditiveGame, FriendGame]


def friends_to_additive(fg: FriendGame) -> AdditiveGame:
    """Additive encoding with the same preferences: friend worth n, enemy -1."""
    n = fg.n
    utils = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                utils[(i, j)] = n if j in fg.friends[i] else -1
    return AdditiveGame(n, utils, fg.original, fg.additional, fg.names)


class Partition:
    """Set partition of some agent set, stored in canonical order.

    Members are sorted, and coalitions are ordered by smallest member.
    Agents not covered by the partition are treated as absent from the game.
    """

    __slots__ = ("blocks", "_where")

    def __init__(self, coalitions: Iterable[Iterable[int]]):
        blocks = []
        seen: dict[int, int] = {}
        for c in coalitions:
            members = tuple(sorted(set(c)))
            if not members:
                raise InvalidPartition("empty coalition")
            blocks.append(members)
        blocks.sort(key=lambda b: b[0])
        for t, b in enumerate(blocks):
            for a in b:
                if a in seen:
                    raise InvalidPartition(f"agent {a} appears in two coalitions")
                seen[a] = t
        self.blocks: tuple[tuple[int, ...], ...] = tuple(blocks)
        self._where = seen

    @classmethod
    def singletons(cls, agents: Iterable[int]) -> "Partition":
        return cls([a] for a in agents)

    @classmethod
    def grand(cls, agents: Iterable[int]) -> "Partition":
        return cls([list(agents)])

    @classmethod
    def with_coalition(cls, coalition: Iterable[int], agents: Iterable[int]) -> "Partition":
        """One coalition plus singletons for every other agent in `agents`."""
        coalition = set(coalition)
        return cls([sorted(coalition)] + [[a] for a in agents if a not in coalition])

    @property
    def agents(self) -> frozenset:
        return frozenset(self._where)

    @property
    def coalitions(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(b) for b in self.blocks)

    def index_of(self, agent: int) -> int:
        return self._where[agent]

    def coalition_of(self, agent: int) -> tuple[int, ...]:
        try:
            return self.blocks[self._where[agent]]
        except KeyError:
            raise InvalidPartition(f"agent {agent} is not in the partition") from None

    def together(self, a: int, b: int) -> bool:
        return a in self._where and b in self._where and self._where[a] == self._where[b]

    def check_covers(self, agents: Iterable[int]) -> None:
        agents = frozenset(agents)
        if agents != self.agents:
            raise InvalidPartition("partition does not cover the agent set exactly")

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __repr__(self) -> str:
        return "Partition(" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + ")"


class GameClass(NamedTuple):
    is_dag: bool
    is_symmetric: bool


def _arc_pairs(game: Game) -> Iterator[tuple[int, int]]:
    return game.arcs()


def classify_game(game: Game) -> GameClass:
    """Acyclicity and symmetry of the nonzero-utility (or friendship) digraph."""
    n = game.n
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    arcs = set()
    for i, j in _arc_pairs(game):
        succ[i].append(j)
        indeg[j] += 1
        arcs.add((i, j))
    queue = deque(i for i in range(n) if indeg[i] == 0)
    seen = 0
    while queue:
        v = queue.popleft()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if isinstance(game, AdditiveGame):
        sym = all(game.u(j, i) == w for (i, j), w in game.utilities.items())
    else:
        sym = all((j, i) in arcs for i, j in arcs)
    return GameClass(seen == n, sym)


def value(game: Game, agent: int, coalition: Iterable[int]):
    """Agent's valuation of a coalition: an int, or (friends, -enemies) for friend games."""
    if isinstance(game, AdditiveGame):
        row = game.out[agent]
        return sum(row.get(j, 0) for j in coalition if j != agent)
    f = e = 0
    fr = game.friends[agent]
    for j in coalition:
        if j == agent:
            continue
        if j in fr:
            f += 1
        else:
            e += 1
    return (f, -e)


def prefers(game: Game, agent: int, first: Iterable[int], second: Iterable[int]) -> Preference:
    """Compare two coalitions that both contain `agent`."""
    first, second = set(first), set(second)
    if agent not in first or agent not in second:
        raise InvalidPartition("both coalitions must contain the agent")
    a, b = value(game, agent, first), value(game, agent, second)
    if a > b:
        return Preference.FIRST
    if a < b:
        return Preference.SECOND
    return Preference.INDIFFERENT


@dataclass(frozen=True)
class ControlQuery:
    game: Game
    stability: Stability
    goal: Goal
    action: Action
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "stability", Stability(self.stability))
        object.__setattr__(self, "action", Action(self.action))
        if self.budget < 0:
            raise InvalidQuery("budget must be non-negative")
        if not self.game.original:
            raise InvalidQuery("the original agent set must be nonempty")
        for a in self.goal.agents:
            if not (0 <= a < self.game.n):
                raise InvalidQuery(f"goal agent {a} is not in the game")
            if a not in self.game.original:
                raise InvalidQuery("goal agents must be original agents")
        if self.action is Action.DEL and self.game.additional:
            raise InvalidQuery("deleting agents requires an empty additional set")


@dataclass(frozen=True)
class Witness:
    action: Action
    chosen: frozenset
    partition: Partition

    def format(self, names: Sequence[str]) -> str:
        sign = "+" if self.action is Action.ADD else "-"
        return sign + "{" + ",".join(names[a] for a in sorted(self.chosen)) + "}"


@dataclass(frozen=True)
class SolveOutcome:
    decision: bool
    route: Route
    witness: Optional[Witness] = None
    note: str = field(default="", compare=False)

    def __bool__(self) -> bool:
        return self.decision


def final_agents(query: ControlQuery, chosen: Iterable[int]) -> frozenset:
    """Agent set left after applying the control action."""
    chosen = frozenset(chosen)
    if query.action is Action.ADD:
        return query.game.original | chosen
    return query.game.original - chosen
