"""``tsogame`` command-line front end.

Exit codes: 0 success, 1 a property failed or ``--expect`` did not match,
2 usage or parse error, 3 undecidable variant.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .arena import ArenaCapacityError, Deadlock, GameSpec, UpdatePolicy, build_arena, classify
from .compiler import compile_pcs, format_markers, probe_gadgets
from .game import A, B, ArenaError, PositionalStrategy, dump_arena, extract_strategies, load_arena, play, solve
from .pcs import PcsSyntaxError, parse_pcs
from .program import ProgramSemanticError, ProgramSyntaxError, format_program, parse_program, validate
from .reductions import UndecidableVariant, WrongGroup, build_view_game, compare_with_bounded, solve_tso

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDABLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _policy(text: str) -> UpdatePolicy:
    try:
        return UpdatePolicy.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown policy {text!r} (never|before|after|always)") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_program(path: str):
    p = parse_program(_read(path))
    problems = validate(p)
    if problems:
        raise UsageError("; ".join(problems))
    return p


def _spec(args, program) -> GameSpec:
    return GameSpec(
        program,
        policy_a=args.a,
        policy_b=args.b,
        first_mover=args.first,
        deadlock=Deadlock(args.deadlock),
        buffer_bound=args.bound,
    )


def _trailer(winner: str, method: str, game) -> str:
    return f"RESULT winner={winner} method={method} nodes={len(game.owner)} edges={game.num_edges}"


def _expect(args, winner: str) -> int:
    if getattr(args, "expect", None) and args.expect != winner:
        print(f"expected winner {args.expect}, got {winner}")
        return EXIT_FAIL
    return EXIT_OK


def _write_dump(path: str, arena) -> None:
    Path(path).write_text(dump_arena(arena.game))
    Path(path + ".index").write_text(arena.dump_index())


# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    p = _load_program(args.program)
    n_trans = sum(len(proc.transitions) for proc in p.processes)
    print(f"ok: {len(p.processes)} processes, {len(p.variables)} variables, "
          f"|domain|={len(p.domain)}, {n_trans} transitions")
    return EXIT_OK


def cmd_classify(args) -> int:
    print(classify(args.a, args.b).value)
    return EXIT_OK


def cmd_solve(args) -> int:
    spec = _spec(args, _load_program(args.program))
    sol = solve_tso(spec)
    g = sol.arena.game
    print(f"group: {spec.group.value}")
    print(f"method: {sol.method}" + (f" (bound {sol.bound})" if sol.bound is not None else ""))
    print(f"winner: {sol.winner}")
    print(f"regions: |win_A|={len(sol.regions.win_A)} |win_B|={len(sol.regions.win_B)}")
    if args.horizon:
        pl = play(g, *sol.strategies, sol.arena.initial, args.horizon)
        print(f"witness: {pl.verdict}")
        for i, u in enumerate(pl.prefix):
            print(f"  {i:3d} {sol.arena.describe(u)}")
    if args.emit:
        _write_dump(args.emit, sol.arena)
    print(_trailer(sol.winner, sol.method, g))
    return _expect(args, sol.winner)


def cmd_emit_arena(args) -> int:
    if args.bound is None:
        raise UsageError("emit-arena needs --bound")
    arena = build_arena(_spec(args, _load_program(args.program)))
    _write_dump(args.emit, arena)
    winner = solve(arena.game).winner(arena.initial)
    print(f"wrote {args.emit} and {args.emit}.index")
    print(_trailer(winner, "Bounded", arena.game))
    return _expect(args, winner)


def cmd_view_game(args) -> int:
    arena = build_view_game(_spec(args, _load_program(args.program)))
    if args.emit:
        _write_dump(args.emit, arena)
        print(f"wrote {args.emit} and {args.emit}.index")
    winner = solve(arena.game).winner(arena.initial)
    print(_trailer(winner, "GroupIV", arena.game))
    return _expect(args, winner)


def _load_strategy(path: str, player: str) -> PositionalStrategy:
    choice = {}
    for n, line in enumerate(_read(path).splitlines(), start=1):
        toks = line.split("#", 1)[0].split()
        if not toks:
            continue
        if len(toks) != 2:
            raise UsageError(f"{path}:{n}: expected '<node> <successor>'")
        choice[int(toks[0])] = int(toks[1])
    return PositionalStrategy(player, choice)


def cmd_play(args) -> int:
    g = load_arena(_read(args.arena))
    if args.sa is None or args.sb is None:
        sa, sb = extract_strategies(g, solve(g))
    if args.sa is not None:
        sa = _load_strategy(args.sa, A)
    if args.sb is not None:
        sb = _load_strategy(args.sb, B)
    pl = play(g, sa, sb, args.start, args.horizon)
    print(f"verdict: {pl.verdict}")
    print("prefix: " + " ".join(map(str, pl.prefix)))
    return _expect(args, B if pl.b_reached_final else A)


def _load_pcs(args):
    l = parse_pcs(_read(args.pcs))
    return compile_pcs(l, args.target)


def cmd_compile_pcs(args) -> int:
    cg = _load_pcs(args)
    text = format_program(cg.program)
    if args.emit:
        Path(args.emit).write_text(text)
        Path(args.emit + ".markers").write_text(format_markers(cg))
        print(f"wrote {args.emit} and {args.emit}.markers")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_probe(args) -> int:
    results = probe_gadgets(_load_pcs(args))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_compare(args) -> int:
    ks = [int(k) for k in args.ks.split(",")] if args.ks else None
    agr = compare_with_bounded(_spec(args, _load_program(args.program)), ks)
    for line in agr.lines():
        print(line)
    return EXIT_OK if agr.ok else EXIT_FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsogame", description="Safety games over TSO programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def game_flags(p, bound=True):
        p.add_argument("--a", type=_policy, default=UpdatePolicy.NEVER, help="update policy of player A")
        p.add_argument("--b", type=_policy, default=UpdatePolicy.NEVER, help="update policy of player B")
        p.add_argument("--first", choices=(A, B), default=B)
        p.add_argument("--deadlock", choices=[d.value for d in Deadlock], default=Deadlock.LOSES.value)
        if bound:
            p.add_argument("--bound", type=int, help="total buffer bound for explicit exploration")

    p = sub.add_parser("check", help="parse and validate a program")
    p.add_argument("program")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", help="group of a policy pair")
    p.add_argument("--a", type=_policy, required=True)
    p.add_argument("--b", type=_policy, required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", help="decide the winner of a TSO game")
    p.add_argument("program")
    game_flags(p)
    p.add_argument("--horizon", type=int, help="also print a witness play of this length")
    p.add_argument("--emit", help="write the solved arena dump here")
    p.add_argument("--expect", choices=(A, B))
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("emit-arena", help="write the bounded arena and its index")
    p.add_argument("program")
    game_flags(p)
    p.add_argument("--emit", required=True)
    p.add_argument("--expect", choices=(A, B))
    p.set_defaults(func=cmd_emit_arena)

    p = sub.add_parser("view-game", help="build the view game of a no-update game")
    p.add_argument("program")
    game_flags(p, bound=False)
    p.add_argument("--emit")
    p.add_argument("--expect", choices=(A, B))
    p.set_defaults(func=cmd_view_game, bound=None)

    p = sub.add_parser("play", help="replay positional strategies on an arena dump")
    p.add_argument("arena")
    p.add_argument("--sa", help="strategy file for A (default: extracted)")
    p.add_argument("--sb", help="strategy file for B (default: extracted)")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--expect", choices=(A, B))
    p.set_defaults(func=cmd_play)

    for name, func, helptext in (
        ("compile-pcs", cmd_compile_pcs, "compile a channel system into an A-TSO program"),
        ("probe", cmd_probe, "run the gadget probes on a compiled channel system"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("pcs")
        p.add_argument("--target", required=True)
        if name == "compile-pcs":
            p.add_argument("--emit")
        p.set_defaults(func=func)

    p = sub.add_parser("compare", help="reduced game against bounded arenas")
    p.add_argument("program")
    game_flags(p)
    p.add_argument("--ks", help="comma-separated bounds for the oracle arenas")
    p.set_defaults(func=cmd_compare)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UndecidableVariant as e:
        print(f"undecidable: {e}", file=sys.stderr)
        return EXIT_UNDECIDABLE
    except (UsageError, ProgramSyntaxError, ProgramSemanticError, PcsSyntaxError, WrongGroup, ArenaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ArenaCapacityError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
