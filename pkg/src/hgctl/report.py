"""Route table, solver-versus-oracle sweeps, and their TSV and PNG renderings."""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterable, Optional

from .control_add import add_route, solve_add
from .control_fri import fri_route, solve_fri
from .core import (
    Action, AdditiveGame, ControlQuery, FriendGame, GameClass, Goal, GoalKind, Route, Stability,
)
from .exact import oracle_control
from .gen import gen_random

STABILITIES = (Stability.IR, Stability.IS, Stability.NS, Stability.CS)
GOALS = (GoalKind.NA, GoalKind.PA, GoalKind.GR)
ACTIONS = (Action.ADD, Action.DEL)
CELLS = tuple(product(STABILITIES, GOALS, ACTIONS))
CLASSES = {"general": GameClass(False, False), "dag": GameClass(True, False),
           "symmetric": GameClass(False, True)}


def cell_name(cell) -> str:
    s, g, a = cell
    return f"{s.value}-{g.value}-{a.value}"


def route_for(model: str, cell, cls: GameClass) -> Route:
    s, g, a = cell
    return (fri_route if model == "friends" else add_route)(s, g, a, cls)


def route_table() -> list[tuple[str, str, str, str]]:
    rows = []
    for model in ("friends", "additive"):
        for cname, cls in CLASSES.items():
            for cell in CELLS:
                rows.append((model, cname, cell_name(cell), route_for(model, cell, cls).value))
    return rows


@dataclass(frozen=True)
class Comparison:
    model: str
    instance: int
    cell: str
    route: str
    solver: bool
    oracle: bool
    solver_size: Optional[int]
    oracle_size: Optional[int]

    @property
    def agrees(self) -> bool:
        return self.solver == self.oracle

    @property
    def minimal(self) -> bool:
        return self.solver_size == self.oracle_size


def random_instance(model: str, seed: int, max_n: int = 7):
    """One sweep instance: structure class, size, density and split all drawn from `seed`."""
    rng = random.Random(seed)
    n = rng.randint(2, max_n)
    shape = rng.choice(["general", "dag", "symmetric"])
    game = gen_random(model, n, arc_density=rng.uniform(0.2, 0.7), weight_range=(-3, 3),
                      symmetric=shape == "symmetric", dag=shape == "dag",
                      split_fraction=rng.uniform(0.0, 0.5), seed=rng.randrange(2**31))
    k = rng.randint(0, 2)
    original = sorted(game.original)
    x = rng.choice(original)
    others = [a for a in original if a != x]
    y = rng.choice(others) if others else None
    return game, x, y, k


def _queries(game, x, y, k):
    merged = game.with_split(())
    for cell in CELLS:
        s, g, a = cell
        if g is GoalKind.PA and y is None:
            continue
        goal = Goal.gr() if g is GoalKind.GR else Goal.na(x) if g is GoalKind.NA else Goal.pa(x, y)
        yield cell, ControlQuery(game if a is Action.ADD else merged, s, goal, a, k)


def compare_instance(model: str, seed: int, max_n: int = 7,
                     include_exact: bool = False) -> list[Comparison]:
    game, x, y, k = random_instance(model, seed, max_n)
    solver = solve_fri if model == "friends" else solve_add
    out = []
    caches = {Action.ADD: {}, Action.DEL: {}}
    for cell, q in _queries(game, x, y, k):
        got = solver(q)
        if got.route is Route.EXACT and not include_exact:
            continue
        ref = oracle_control(q, caches[q.action])
        out.append(Comparison(
            model, seed, cell_name(cell), got.route.value, got.decision, ref.decision,
            len(got.witness.chosen) if got.decision else None,
            len(ref.witness.chosen) if ref.decision else None))
    return out


def _job(args):
    return compare_instance(*args)


def sweep(model: str, count: int, seed: int = 0, max_n: int = 7, threads: int = 1,
          include_exact: bool = False) -> list[Comparison]:
    jobs = [(model, seed * 1_000_003 + t, max_n, include_exact) for t in range(count)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_job, jobs, chunksize=8))
    else:
        chunks = [_job(j) for j in jobs]
    return [c for chunk in chunks for c in chunk]


def write_route_tsv(path: Path) -> None:
    lines = ["model\tclass\tcell\troute"]
    lines += ["\t".join(r) for r in route_table()]
    path.write_text("\n".join(lines) + "\n")


def agreement_rows(results: Iterable[Comparison]) -> list[tuple[str, str, int, int, int]]:
    """(model, cell, compared, agreeing, minimal) per cell."""
    acc: dict[tuple[str, str], list[int]] = {}
    for r in results:
        a = acc.setdefault((r.model, r.cell), [0, 0, 0])
        a[0] += 1
        a[1] += r.agrees
        a[2] += r.agrees and r.minimal
    return [(m, c, *v) for (m, c), v in sorted(acc.items())]


def write_agreement_tsv(path: Path, results: Iterable[Comparison]) -> None:
    lines = ["model\tcell\tcompared\tagree\tminimal"]
    lines += ["\t".join(map(str, r)) for r in agreement_rows(results)]
    path.write_text("\n".join(lines) + "\n")


_ROUTE_ORDER = [r.value for r in Route]


def plot_routes(path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap

    table = route_table()
    cols = [cell_name(c) for c in CELLS]
    rows = [(m, c) for m in ("friends", "additive") for c in CLASSES]
    grid = [[0] * len(cols) for _ in rows]
    for model, cname, cell, route in table:
        grid[rows.index((model, cname))][cols.index(cell)] = _ROUTE_ORDER.index(route)
    cmap = ListedColormap(["#4c9f70", "#e0b040", "#c0504d", "#5b7fbf", "#9e9e9e", "#d9d9d9"])
    fig, ax = plt.subplots(figsize=(12, 3.6))
    ax.imshow(grid, cmap=cmap, vmin=-0.5, vmax=len(_ROUTE_ORDER) - 0.5, aspect="auto")
    ax.set_xticks(range(len(cols)), cols, rotation=90, fontsize=7)
    ax.set_yticks(range(len(rows)), [f"{m}/{c}" for m, c in rows], fontsize=8)
    for r in range(len(rows)):
        for c in range(len(cols)):
            ax.text(c, r, _ROUTE_ORDER[grid[r][c]], ha="center", va="center", fontsize=5)
    ax.set_title("solver route per cell")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_agreement(path: Path, results: Iterable[Comparison]) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = agreement_rows(results)
    fig, ax = plt.subplots(figsize=(12, 4))
    labels = [f"{m[:3]}:{c}" for m, c, *_ in rows]
    compared = [r[2] for r in rows]
    agree = [r[3] for r in rows]
    minimal = [r[4] for r in rows]
    xs = range(len(rows))
    ax.bar(xs, compared, color="#d9d9d9", label="compared")
    ax.bar(xs, agree, color="#5b7fbf", label="decision agrees", width=0.6)
    ax.bar(xs, minimal, color="#4c9f70", label="witness minimal", width=0.3)
    ax.set_xticks(list(xs), labels, rotation=90, fontsize=6)
    ax.set_ylabel("queries")
    ax.legend(fontsize=7)
    ax.set_title("solver versus exhaustive oracle")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(out_dir: Path, count: int, seed: int = 0, threads: int = 1) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for model in ("friends", "additive"):
        results += sweep(model, count, seed, threads=threads)
    paths = [out_dir / "routes.tsv", out_dir / "agreement.tsv",
             out_dir / "routes.png", out_dir / "agreement.png"]
    write_route_tsv(paths[0])
    write_agreement_tsv(paths[1], results)
    plot_routes(paths[2])
    plot_agreement(paths[3], results)
    return paths
