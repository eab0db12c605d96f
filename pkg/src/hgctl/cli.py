"""Command-line interface: solve, oracle, verify, classify, gen, report."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import solve
from .core import (
    Action, AdditiveGame, CapExceeded, ControlQuery, FriendGame, Game, Goal, GoalKind,
    HgctlError, SolveOutcome, Stability, classify_game,
)
from .exact import oracle_control
from .formats import dump_instance, dump_partition, load_instance, load_partition
from .report import CELLS, cell_name, route_for, write_report
from .stability import is_stable

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


class UsageError(HgctlError):
    pass


def _goal(game: Game, args) -> Goal:
    kind = GoalKind(args.goal)
    if kind is GoalKind.GR:
        if args.agent or args.agent2:
            raise UsageError("GR takes no --agent")
        return Goal.gr()
    if not args.agent:
        raise UsageError(f"{kind.value} needs --agent")
    if kind is GoalKind.NA:
        if args.agent2:
            raise UsageError("NA takes a single --agent")
        return Goal.na(game.index_of(args.agent))
    if not args.agent2:
        raise UsageError("PA needs --agent and --agent2")
    return Goal.pa(game.index_of(args.agent), game.index_of(args.agent2))


def _query(args) -> ControlQuery:
    game, _ = load_instance(args.instance)
    action = Action(args.action)
    if action is Action.DEL and game.additional:
        # deletions act on the original agents only
        game = game.restrict(sorted(game.original))
    return ControlQuery(game, Stability(args.stability), _goal(game, args), action, args.budget)


def _print_outcome(q: ControlQuery, out: SolveOutcome, witness_out: Optional[str]) -> int:
    names = q.game.names
    if out.decision:
        w = out.witness
        print(f"YES route={out.route.value} witness={w.format(names)}")
        print("partition " + " ".join("{" + ",".join(names[a] for a in b) + "}"
                                      for b in w.partition.blocks))
        if witness_out:
            doc = json.loads(dump_partition(w.partition, q.game))
            doc = {"action": q.action.value, "chosen": [names[a] for a in sorted(w.chosen)], **doc}
            Path(witness_out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        return EXIT_YES
    print(f"NO route={out.route.value}")
    return EXIT_NO


def cmd_solve(args) -> int:
    q = _query(args)
    return _print_outcome(q, solve(q), args.witness_out)


def cmd_oracle(args) -> int:
    q = _query(args)
    return _print_outcome(q, oracle_control(q), args.witness_out)


def cmd_verify(args) -> int:
    game, _ = load_instance(args.instance)
    part = load_partition(args.partition, game)
    verdict = is_stable(game, part, Stability(args.stability))
    if verdict:
        print("YES")
        return EXIT_YES
    names = game.names
    members = ",".join(names[a] for a in sorted(verdict.target))
    who = names[verdict.agent] if verdict.agent is not None else ""
    print(f"NO {verdict.kind} agent={who} target={{{members}}}")
    return EXIT_NO


def cmd_classify(args) -> int:
    game, _ = load_instance(args.instance)
    cls = classify_game(game)
    model = "friends" if isinstance(game, FriendGame) else "additive"
    print(f"model={model} symmetric={str(cls.is_symmetric).lower()} dag={str(cls.is_dag).lower()}")
    for cell in CELLS:
        print(f"{cell_name(cell)} {route_for(model, cell, cls).value}")
    return EXIT_YES


def _emit(game: Game, meta: dict, out: Optional[str]) -> int:
    text = dump_instance(game, meta)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        fixture = {"source": meta.get("source"), "expected": meta.get("expected")}
        Path(out + ".fixture.json").write_text(json.dumps(fixture, indent=2) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_YES


def _parse_sets(raw: str) -> list[frozenset]:
    return [frozenset(int(e) for e in part.split(",")) for part in raw.split(";") if part.strip()]


def cmd_gen(args) -> int:
    from . import gen

    kind = args.kind
    if kind.startswith("rx3c-"):
        if args.plant:
            inst, _ = gen.planted_rx3c(args.n_hat, args.seed)
            expected = True
        else:
            inst = gen.random_rx3c(args.n_hat, args.seed)
            # the backtracking solver is only quick on small sources
            expected = gen.solve_rx3c(inst) is not None if args.n_hat <= 10 else None
        build = {
            "rx3c-ir-na": gen.gen_rx3c_ir_na, "rx3c-isns-dag": gen.gen_rx3c_isns_dag,
            "rx3c-isns-sym": gen.gen_rx3c_isns_sym, "rx3c-ir-pa-dag": gen.gen_rx3c_ir_pa_dag,
            "rx3c-ir-pa-sym": gen.gen_rx3c_ir_pa_sym,
        }[kind]
        game, *goal = build(inst)
        meta = {"generator": kind, "seed": args.seed,
                "source": {"n_hat": inst.n_hat, "sets": [list(s) for s in inst.sets]},
                "goal_agents": [game.names[a] for a in goal], "expected": expected}
        return _emit(game, meta, args.out)
    if kind in ("setcover-fri-gr", "setcover-add-gr"):
        sets = _parse_sets(args.sets)
        universe = args.universe or max((max(s) for s in sets), default=0)
        sc = gen.SetCover(universe, tuple(sets), args.h)
        if kind == "setcover-fri-gr":
            game, k = gen.gen_setcover_fri_gr(sc)
        else:
            game, k = gen.gen_setcover_add_gr(sc, args.action, args.variant)
        best = gen.min_set_cover(sc)
        meta = {"generator": kind, "budget": k,
                "source": {"universe": universe, "sets": [sorted(s) for s in sets], "h": args.h},
                "expected": best is not None and best <= args.h}
        return _emit(game, meta, args.out)
    if kind == "clique-cs-gr":
        edges = [tuple(int(v) for v in e.split("-")) for e in args.edges.split(",") if e]
        game = gen.gen_clique_cs_gr(args.vertices, edges, args.h)
        meta = {"generator": kind, "budget": 0,
                "source": {"vertices": args.vertices, "edges": [list(e) for e in edges], "h": args.h},
                "expected": gen.max_clique(args.vertices, edges) < args.h}
        return _emit(game, meta, args.out)
    game = gen.gen_random(args.model, args.n, args.density, (-args.max_weight, args.max_weight),
                          args.symmetric, args.dag, args.split, args.seed)
    return _emit(game, {"generator": "random", "seed": args.seed}, args.out)


def cmd_report(args) -> int:
    for p in write_report(Path(args.out), args.instances, args.seed, args.threads):
        print(p)
    return EXIT_YES


def _query_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance")
    p.add_argument("--stability", required=True, choices=[s.value for s in Stability])
    p.add_argument("--goal", required=True, choices=[g.value for g in GoalKind])
    p.add_argument("--agent")
    p.add_argument("--agent2")
    p.add_argument("--action", required=True, choices=[a.value for a in Action])
    p.add_argument("--budget", type=int, default=0)
    p.add_argument("--witness-out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hgctl", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="answer a control query with the routed solver")
    _query_flags(p)
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("oracle", help="answer a control query by exhaustive search")
    _query_flags(p)
    p.set_defaults(func=cmd_oracle)
    p = sub.add_parser("verify", help="check a partition file against a stability concept")
    p.add_argument("instance")
    p.add_argument("partition")
    p.add_argument("--stability", required=True, choices=[s.value for s in Stability])
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("classify", help="structure flags and the route of every query cell")
    p.add_argument("instance")
    p.set_defaults(func=cmd_classify)
    p = sub.add_parser("gen", help="write a generated instance")
    p.add_argument("kind", choices=["rx3c-ir-na", "rx3c-isns-dag", "rx3c-isns-sym", "rx3c-ir-pa-dag",
                                    "rx3c-ir-pa-sym", "setcover-fri-gr", "setcover-add-gr",
                                    "clique-cs-gr", "random"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--n-hat", type=int, default=1)
    p.add_argument("--plant", action="store_true", help="plant exact covers in the RX3C source")
    p.add_argument("--sets", default="1;2", help="set-cover sets, e.g. '1,2;2,3'")
    p.add_argument("--universe", type=int, default=0)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--action", choices=["add", "del"], default="add")
    p.add_argument("--variant", choices=["dag", "sym"], default="dag")
    p.add_argument("--vertices", type=int, default=4)
    p.add_argument("--edges", default="0-1,1-2,2-3,3-0", help="clique graph, e.g. '0-1,1-2'")
    p.add_argument("--model", choices=["additive", "friends"], default="additive")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--density", type=float, default=0.4)
    p.add_argument("--max-weight", type=int, default=3)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--dag", action="store_true")
    p.add_argument("--split", type=float, default=0.3)
    p.set_defaults(func=cmd_gen)
    p = sub.add_parser("report", help="route table and oracle agreement, as TSV and PNG")
    p.add_argument("--out", required=True)
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as e:
        print(f"error: exact search cap exceeded: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (HgctlError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
