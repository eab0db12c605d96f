import os

from hypothesis import HealthCheck, settings, strategies as st

from hgctl.core import AdditiveGame, FriendGame, Partition

settings.register_profile("default", deadline=None, max_examples=120,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def additive_games(draw, min_n=1, max_n=6, weights=(-3, 3), split=False):
    n = draw(st.integers(min_n, max_n))
    lo, hi = weights
    nonzero = st.integers(lo, hi).filter(lambda w: w != 0)
    arcs = {}
    for i in range(n):
        for j in range(n):
            if i != j and draw(st.booleans()):
                arcs[(i, j)] = draw(nonzero)
    additional = ()
    if split and n > 1:
        additional = draw(st.sets(st.integers(0, n - 1), max_size=n - 1))
    return AdditiveGame(n, arcs, None, frozenset(additional))


@st.composite
def friend_games(draw, min_n=1, max_n=6, split=False):
    n = draw(st.integers(min_n, max_n))
    friends = [frozenset(j for j in range(n) if j != i and draw(st.booleans())) for i in range(n)]
    additional = ()
    if split and n > 1:
        additional = draw(st.sets(st.integers(0, n - 1), max_size=n - 1))
    return FriendGame(n, tuple(friends), None, frozenset(additional))


@st.composite
def partitions_of(draw, agents):
    agents = list(agents)
    labels = [draw(st.integers(0, len(agents) - 1)) for _ in agents]
    blocks = {}
    for a, lab in zip(agents, labels):
        blocks.setdefault(lab, []).append(a)
    return Partition(blocks.values())


EXAMPLE_NAMES = ("u1", "u2", "u3", "w1", "w2")
EXAMPLE_ARCS = [(0, 1, -1), (2, 0, -2), (2, 1, 2), (0, 3, 1), (3, 0, -1), (0, 4, 1), (4, 0, -1), (4, 2, 1)]


def example_game() -> AdditiveGame:
    """Three original agents u1..u3 and two candidates w1, w2; only w2 rescues u1."""
    return AdditiveGame.from_arcs(5, EXAMPLE_ARCS, additional=[3, 4], names=EXAMPLE_NAMES)


def friends(n, arcs, additional=()):
    return FriendGame.from_arcs(n, arcs, additional)


ACCEPTANCE: dict = {}


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda c: (int(c.rstrip("abc")), c)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip())
