"""Finite two-player safety games on explicit bipartite arenas.

Player B tries to reach a final node, player A tries to avoid it forever.
Nodes are integers ``0..n-1``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

A = "A"
B = "B"


class ArenaError(ValueError):
    pass


@dataclass(frozen=True)
class SafetyGame:
    owner: tuple[str, ...]
    edges: tuple[tuple[int, ...], ...]
    final: frozenset[int]

    @property
    def nodes(self) -> range:
        return range(len(self.owner))

    @property
    def num_edges(self) -> int:
        return sum(len(e) for e in self.edges)

    def check(self) -> None:
        """Raise ``ArenaError`` unless the arena is bipartite, total, and final ⊆ A."""
        n = len(self.owner)
        if len(self.edges) != n:
            raise ArenaError("edge table does not cover every node")
        for u in range(n):
            if self.owner[u] not in (A, B):
                raise ArenaError(f"node {u}: bad owner {self.owner[u]!r}")
            if not self.edges[u]:
                raise ArenaError(f"node {u} is deadlocked")
            for v in self.edges[u]:
                if not 0 <= v < n:
                    raise ArenaError(f"edge {u}->{v} leaves the arena")
                if self.owner[v] == self.owner[u]:
                    raise ArenaError(f"edge {u}->{v} does not alternate ownership")
        for f in self.final:
            if not 0 <= f < n or self.owner[f] != A:
                raise ArenaError(f"final node {f} is not an A-node")

    def predecessors(self) -> list[list[int]]:
        try:
            return self.__dict__["_preds"]
        except KeyError:
            preds: list[list[int]] = [[] for _ in self.owner]
            for u, succ in enumerate(self.edges):
                for v in succ:
                    preds[v].append(u)
            object.__setattr__(self, "_preds", preds)
            return preds


@dataclass(frozen=True)
class Regions:
    win_A: frozenset[int]
    win_B: frozenset[int]
    rank: dict[int, int] = field(default_factory=dict, compare=False)

    def winner(self, node: int) -> str:
        return B if node in self.win_B else A


@dataclass(frozen=True)
class PositionalStrategy:
    player: str
    choice: dict[int, int]

    def __call__(self, node: int) -> int:
        return self.choice[node]


@dataclass(frozen=True)
class Play:
    prefix: list
    final_index: Optional[int]  # first final hit, None if A survived the horizon

    @property
    def b_reached_final(self) -> bool:
        return self.final_index is not None

    @property
    def verdict(self) -> str:
        if self.final_index is None:
            return "A_survived_horizon"
        return f"B_reached_final@{self.final_index}"


def _check_nodes(g: SafetyGame, ns: Iterable[int]) -> set[int]:
    ns = set(ns)
    n = len(g.owner)
    bad = [u for u in ns if not (isinstance(u, int) and 0 <= u < n)]
    if bad:
        raise ArenaError(f"unknown node(s): {sorted(bad)[:5]}")
    return ns


def post_set(g: SafetyGame, ns: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for u in _check_nodes(g, ns):
        out.update(g.edges[u])
    return out


def pre_set(g: SafetyGame, ns: Iterable[int]) -> set[int]:
    preds = g.predecessors()
    out: set[int] = set()
    for u in _check_nodes(g, ns):
        out.update(preds[u])
    return out


def solve(g: SafetyGame) -> Regions:
    """B-attractor of the final set, in O(n + m).

    ``rank[u]`` is the attractor layer a node entered (final nodes have rank 0);
    the queue is processed in nondecreasing rank order, so every B-node in the
    attractor has a successor of strictly smaller rank and every attracted
    A-node has only such successors.
    """
    g.check()
    preds = g.predecessors()
    remaining = [len(e) for e in g.edges]
    rank: dict[int, int] = {}
    queue: deque[int] = deque()
    for f in sorted(g.final):
        rank[f] = 0
        queue.append(f)
    owner = g.owner
    while queue:
        v = queue.popleft()
        r = rank[v] + 1
        for u in preds[v]:
            if u in rank:
                continue
            if owner[u] == B:
                rank[u] = r
                queue.append(u)
            else:
                remaining[u] -= 1
                if remaining[u] == 0:
                    rank[u] = r
                    queue.append(u)
    win_B = frozenset(rank)
    win_A = frozenset(u for u in g.nodes if u not in rank)
    return Regions(win_A=win_A, win_B=win_B, rank=rank)


def extract_strategies(g: SafetyGame, r: Regions) -> tuple[PositionalStrategy, PositionalStrategy]:
    """Positional strategies for A and B; ties broken by lowest node id."""
    if r.win_A | r.win_B != frozenset(g.nodes) or r.win_A & r.win_B:
        raise ArenaError("regions do not partition the arena")
    sa: dict[int, int] = {}
    sb: dict[int, int] = {}
    for u in g.nodes:
        succ = sorted(g.edges[u])
        if g.owner[u] == B:
            if u in r.win_B and u not in g.final:
                better = [v for v in succ if r.rank.get(v, len(g.owner) + 1) < r.rank[u]]
                if not better:
                    raise ArenaError(f"B-node {u} in win_B has no rank-decreasing successor")
                sb[u] = better[0]
            else:
                sb[u] = succ[0]
        else:
            if u in r.win_A:
                safe = [v for v in succ if v in r.win_A]
                if not safe:
                    raise ArenaError(f"A-node {u} in win_A has no successor in win_A")
                sa[u] = safe[0]
            else:
                sa[u] = succ[0]
    return PositionalStrategy(A, sa), PositionalStrategy(B, sb)


def play(
    g: SafetyGame,
    sa: PositionalStrategy,
    sb: PositionalStrategy,
    start: int,
    horizon: int,
) -> Play:
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    u = start
    prefix = [u]
    for i in range(horizon + 1):
        if u in g.final:
            return Play(prefix, i)
        if i == horizon:
            break
        strat = sa if g.owner[u] == A else sb
        try:
            v = strat.choice[u]
        except KeyError:
            raise ArenaError(f"strategy of {strat.player} undefined at node {u}") from None
        if v not in g.edges[u]:
            raise ArenaError(f"strategy of {strat.player} picks non-edge {u}->{v}")
        u = v
        prefix.append(u)
    return Play(prefix, None)


def dump_arena(g: SafetyGame) -> str:
    """``game v1`` text: nodes ascending, edges lexicographic."""
    lines = [f"game v1 {len(g.owner)} {g.num_edges}"]
    for u in g.nodes:
        lines.append(f"node {u} {g.owner[u]} {'final' if u in g.final else '-'}")
    for u in g.nodes:
        for v in sorted(g.edges[u]):
            lines.append(f"edge {u} {v}")
    return "\n".join(lines) + "\n"


def load_arena(text: str) -> SafetyGame:
    lines = [l.split() for l in text.splitlines() if l.strip()]
    if not lines or lines[0][:2] != ["game", "v1"] or len(lines[0]) != 4:
        raise ArenaError("missing 'game v1 <n> <m>' header")
    n, m = int(lines[0][2]), int(lines[0][3])
    owner: list[str | None] = [None] * n
    final = set()
    edges: list[list[int]] = [[] for _ in range(n)]
    count = 0
    for toks in lines[1:]:
        if toks[0] == "node" and len(toks) == 4:
            u = int(toks[1])
            owner[u] = toks[2]
            if toks[3] == "final":
                final.add(u)
        elif toks[0] == "edge" and len(toks) == 3:
            edges[int(toks[1])].append(int(toks[2]))
            count += 1
        else:
            raise ArenaError(f"bad arena line: {' '.join(toks)}")
    if count != m or any(o is None for o in owner):
        raise ArenaError("arena header does not match body")
    return SafetyGame(tuple(owner), tuple(tuple(e) for e in edges), frozenset(final))  # type: ignore[arg-type]
