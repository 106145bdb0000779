"""Finite reductions for the decidable policy groups and the top-level dispatcher.

Group I and II games are solved on buffer-restricted sub-arenas; the
no-update game (Group IV) is solved on views.  Group III is refused unless
the caller supplies an explicit bound, in which case a bounded arena is
explored with no soundness claim.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .arena import (
    Arena,
    GameSpec,
    Group,
    MoveGenerator,
    RawGraph,
    UpdatePolicy,
    bounded_family,
    build_arena,
    classify,
    final_predicate,
    finish,
    other,
)
from .game import A, B, PositionalStrategy, Regions, extract_strategies, solve
from .program import Fence, Instruction, Program, Read, Write
from .semantics import Configuration, buffer_size, full_flush, visible_value

log = logging.getLogger(__name__)


class UndecidableVariant(Exception):
    """Raised for Group III specs without an explicit exploration bound."""


class WrongGroup(ValueError):
    pass


class View(NamedTuple):
    states: tuple[str, ...]
    values: tuple[tuple[str, ...], ...]  # values[proc][var index]
    fence_ok: tuple[bool, ...]

    def value(self, p: Program, proc: int, var: str) -> str:
        return self.values[proc][p.var_index[var]]

    def format(self, p: Program) -> str:
        vals = " | ".join(
            ",".join(f"{x}={v}" for x, v in zip(p.variables, row)) + ("" if ok else " !mf")
            for row, ok in zip(self.values, self.fence_ok)
        )
        return f"[{','.join(self.states)}] view=[{vals}]"


def view_of(p: Program, c: Configuration) -> View:
    values = tuple(tuple(visible_value(p, c, i, x) for x in p.variables) for i in range(len(p.processes)))
    return View(c.states, values, tuple(not b for b in c.buffers))


def view_enabled(p: Program, v: View, proc: int, instr: Instruction) -> bool:
    if isinstance(instr, Read):
        return v.value(p, proc, instr.var) == instr.val
    if isinstance(instr, Fence):
        return v.fence_ok[proc]
    return True


def view_step(p: Program, v: View, proc: int, instr: Instruction, target: Optional[str] = None) -> Optional[View]:
    """Successor view, or ``None`` when the instruction is disabled.

    ``target`` selects the destination when the process has several edges
    with the same instruction from its current state; by default the first.
    """
    here = v.states[proc]
    dests = [d for s, i, d in p.processes[proc].outgoing(here) if i == instr]
    if not dests or (target is not None and target not in dests):
        return None
    if not view_enabled(p, v, proc, instr):
        return None
    dst = dests[0] if target is None else target
    states = v.states[:proc] + (dst,) + v.states[proc + 1:]
    if isinstance(instr, Write):
        k = p.var_index[instr.var]
        row = v.values[proc][:k] + (instr.val,) + v.values[proc][k + 1:]
        values = v.values[:proc] + (row,) + v.values[proc + 1:]
        fence = v.fence_ok[:proc] + (False,) + v.fence_ok[proc + 1:]
        return View(states, values, fence)
    return View(states, v.values, v.fence_ok)


def view_successors(p: Program, v: View) -> set[View]:
    out = set()
    for i, proc in enumerate(p.processes):
        for _, instr, dst in proc.outgoing(v.states[i]):
            w = view_step(p, v, i, instr, dst)
            if w is not None:
                out.add(w)
    return out


def build_view_game(spec: GameSpec) -> Arena:
    if classify(spec.policy_a, spec.policy_b) is not Group.IV:
        raise WrongGroup("the view game needs both policies 'never'")
    p = spec.program
    root = (view_of(p, spec.initial), spec.first_mover)
    raw = RawGraph(root)
    raw.succ[root] = None
    todo = deque([root])
    while todo:
        node = todo.popleft()
        v, owner = node
        succ = [(w, other(owner)) for w in view_successors(p, v)]
        for s in succ:
            if s not in raw.succ:
                raw.succ[s] = None
                todo.append(s)
        raw.succ[node] = succ
    fsets = p.final_sets()

    def is_final(v: View, owner: str) -> bool:
        return owner == A and any(s in f for s, f in zip(v.states, fsets))

    return finish(raw, p, is_final, spec.deadlock)


def group1_roles(policy_a: UpdatePolicy, policy_b: UpdatePolicy) -> tuple[str, str]:
    """(X, Y): X updates after her turn, Y before hers; X = A when both fit."""
    if policy_a.can_after and policy_b.can_before:
        return A, B
    if policy_b.can_after and policy_a.can_before:
        return B, A
    raise WrongGroup(f"({policy_a.value}, {policy_b.value}) is not a Group I pair")


def reduce_group1(spec: GameSpec) -> Arena:
    """Y-nodes with at most one message, plus the root, plus their successors."""
    x, _ = group1_roles(spec.policy_a, spec.policy_b)
    if len(full_flush(spec.program, spec.initial)) > 1:
        log.info("initial configuration has several full flushes")
    gen = MoveGenerator(spec)
    raw = gen.explore(lambda d, owner: owner == x or buffer_size(d) <= 1)
    return finish(raw, spec.program, final_predicate(spec.program), spec.deadlock)


def group2_bound(initial: Configuration) -> int:
    return max(1, buffer_size(initial))


def reduce_group2(spec: GameSpec) -> Arena:
    if classify(spec.policy_a, spec.policy_b) is not Group.II:
        raise WrongGroup("reduce_group2 needs both policies 'before'")
    bound = group2_bound(spec.initial)
    gen = MoveGenerator(spec)
    raw = gen.explore(lambda d, _owner: buffer_size(d) <= bound)
    return finish(raw, spec.program, final_predicate(spec.program), spec.deadlock)


@dataclass
class TsoSolution:
    winner: str
    method: str  # GroupI | GroupII | GroupIV | BoundedApprox
    arena: Arena
    regions: Regions
    strategies: tuple[PositionalStrategy, PositionalStrategy]
    bound: Optional[int] = None


def _solved(arena: Arena, method: str, bound: Optional[int]) -> TsoSolution:
    regions = solve(arena.game)
    strategies = extract_strategies(arena.game, regions)
    return TsoSolution(regions.winner(arena.initial), method, arena, regions, strategies, bound)


def solve_tso(spec: GameSpec) -> TsoSolution:
    group = classify(spec.policy_a, spec.policy_b)
    if group is Group.I:
        return _solved(reduce_group1(spec), "GroupI", None)
    if group is Group.II:
        return _solved(reduce_group2(spec), "GroupII", group2_bound(spec.initial))
    if group is Group.IV:
        return _solved(build_view_game(spec), "GroupIV", None)
    if spec.buffer_bound is None:
        raise UndecidableVariant(
            f"policies (A={spec.policy_a.value}, B={spec.policy_b.value}) fall in Group III: "
            "the safety problem is undecidable; pass an explicit buffer bound for a bounded exploration"
        )
    return _solved(build_arena(spec), "BoundedApprox", spec.buffer_bound)


def winner_of(arena: Arena) -> str:
    return solve(arena.game).winner(arena.initial)


def max_write_growth(p: Program) -> Optional[int]:
    """Largest number of writes any run can issue, or ``None`` if some cycle writes.

    Summed over processes; a program is write-acyclic when no write edge lies
    on a cycle of its process graph.
    """
    total = 0
    for proc in p.processes:
        adj: dict[str, list[tuple[str, int]]] = {s: [] for s in proc.states}
        for src, instr, dst in proc.transitions:
            adj[src].append((dst, 1 if isinstance(instr, Write) else 0))
        reach: dict[str, set[str]] = {}
        for s in proc.states:
            seen = {s}
            todo = [s]
            while todo:
                u = todo.pop()
                for v, _ in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        todo.append(v)
            reach[s] = seen
        for src, instr, dst in proc.transitions:
            if isinstance(instr, Write) and src in reach[dst]:
                return None
        # no positive cycles, so |states| rounds of relaxation reach the fixpoint
        best = {proc.init: 0}
        for _ in range(len(proc.states)):
            changed = False
            for u, d in list(best.items()):
                for v, w in adj[u]:
                    if best.get(v, -1) < d + w:
                        best[v] = d + w
                        changed = True
            if not changed:
                break
        total += max(best.values())
    return total


def is_write_acyclic(p: Program) -> bool:
    return max_write_growth(p) is not None


@dataclass
class Agreement:
    method: str
    reduced_winner: str
    oracle: dict  # k (or "exact") -> winner

    @property
    def ok(self) -> bool:
        return all(w == self.reduced_winner for w in self.oracle.values())

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if w == self.reduced_winner else 'FAIL'} k={k} reduced={self.reduced_winner} bounded={w}"
            for k, w in self.oracle.items()
        ]


def compare_with_bounded(spec: GameSpec, ks: Optional[list[int]] = None) -> Agreement:
    """Winner of the finite reduction against brute-force bounded arenas."""
    group = classify(spec.policy_a, spec.policy_b)
    if group is Group.III:
        raise UndecidableVariant("no finite reduction exists for Group III")
    sol = solve_tso(spec)
    if group is Group.I:
        ks = ks or [2, 3, 4]
        ks = [k for k in ks if k >= buffer_size(spec.initial)]
    elif group is Group.II:
        b = group2_bound(spec.initial)
        ks = ks or [b + 1, b + 2]
    else:
        growth = max_write_growth(spec.program)
        if growth is None:
            if not ks:
                raise ValueError("program is not write-acyclic; pass explicit bounds")
        else:
            ks = [buffer_size(spec.initial) + growth]
    fam = bounded_family(spec, ks)
    return Agreement(sol.method, sol.winner, {k: winner_of(fam[k]) for k in ks})
