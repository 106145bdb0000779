"""Safety-game arenas induced by a program under TSO with per-player update policies."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Optional

from .game import A, B, SafetyGame
from .program import Program
from .semantics import (
    Configuration,
    _apply,
    buffer_size,
    check_configuration,
    format_configuration,
    initial_configuration,
    instruction_labels,
    update_closure,
)


class UpdatePolicy(enum.Enum):
    NEVER = "never"
    BEFORE = "before"
    AFTER = "after"
    ALWAYS = "always"

    @property
    def can_before(self) -> bool:
        return self in (UpdatePolicy.BEFORE, UpdatePolicy.ALWAYS)

    @property
    def can_after(self) -> bool:
        return self in (UpdatePolicy.AFTER, UpdatePolicy.ALWAYS)

    @classmethod
    def parse(cls, text: str) -> "UpdatePolicy":
        return cls(text.strip().lower())


class Group(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


class Deadlock(enum.Enum):
    LOSES = "loses"  # a deadlocked player loses
    SAFE = "safe"  # a deadlock never leads to a final node


def classify(policy_a: UpdatePolicy, policy_b: UpdatePolicy) -> Group:
    if (policy_a.can_after and policy_b.can_before) or (policy_a.can_before and policy_b.can_after):
        return Group.I
    if policy_a is UpdatePolicy.BEFORE and policy_b is UpdatePolicy.BEFORE:
        return Group.II
    if policy_a is UpdatePolicy.NEVER and policy_b is UpdatePolicy.NEVER:
        return Group.IV
    return Group.III


def other(player: str) -> str:
    return B if player == A else A


@dataclass(frozen=True)
class GameSpec:
    program: Program
    policy_a: UpdatePolicy = UpdatePolicy.NEVER
    policy_b: UpdatePolicy = UpdatePolicy.NEVER
    initial: Optional[Configuration] = None
    first_mover: str = B
    deadlock: Deadlock = Deadlock.LOSES
    buffer_bound: Optional[int] = None

    def __post_init__(self):
        if self.initial is None:
            object.__setattr__(self, "initial", initial_configuration(self.program))
        check_configuration(self.program, self.initial)
        if self.first_mover not in (A, B):
            raise ValueError(f"first mover must be A or B, got {self.first_mover!r}")

    def policy(self, player: str) -> UpdatePolicy:
        return self.policy_a if player == A else self.policy_b

    @property
    def group(self) -> Group:
        return classify(self.policy_a, self.policy_b)


class ArenaCapacityError(RuntimeError):
    def __init__(self, nodes: int):
        super().__init__(f"arena exceeded capacity after {nodes} nodes")
        self.nodes = nodes


# Gadget labels added by deadlock completion.
LOSE_B = "gadget:lose-B"  # B-node moving into the final sink
LOSE_F = "gadget:lose-final"  # final A-node
SAFE_A = "gadget:safe-A"
SAFE_B = "gadget:safe-B"

MAX_NODES = 3_000_000


@dataclass
class Arena:
    game: SafetyGame
    labels: list  # NodeId -> (state, owner) or gadget string
    initial: int
    program: Program
    lookup: dict = field(default_factory=dict, repr=False)

    def node(self, state, owner: str) -> int:
        return self.lookup[(state, owner)]

    def describe(self, u: int) -> str:
        lab = self.labels[u]
        if isinstance(lab, str):
            return lab
        state, owner = lab
        if isinstance(state, Configuration):
            return f"{owner} {format_configuration(self.program, state)}"
        if hasattr(state, "format"):
            return f"{owner} {state.format(self.program)}"
        return f"{owner} {state}"

    def dump_index(self) -> str:
        lines = [f"index v1 {len(self.labels)} initial {self.initial}"]
        for u in range(len(self.labels)):
            lines.append(f"{u} {self.describe(u)}")
        return "\n".join(lines) + "\n"


class RawGraph:
    """Explored arena before NodeId assignment and deadlock completion."""

    def __init__(self, root):
        self.root = root
        self.succ: dict = {}

    def restrict(self, keep: Callable) -> "RawGraph":
        """Reachable part from the root using only kept nodes (the root is always kept)."""
        out = RawGraph(self.root)
        todo = deque([self.root])
        out.succ[self.root] = None
        while todo:
            u = todo.popleft()
            kept = [v for v in self.succ[u] if keep(v)]
            out.succ[u] = kept
            for v in kept:
                if v not in out.succ:
                    out.succ[v] = None
                    todo.append(v)
        return out


class MoveGenerator:
    """Successor relation of the (unbounded) TSO game, with closure memoisation."""

    def __init__(self, spec: GameSpec):
        self.spec = spec
        self.program = spec.program
        self._closure: dict[Configuration, frozenset[Configuration]] = {}
        self._base: dict[Configuration, tuple[Configuration, ...]] = {}

    def closure(self, c: Configuration) -> frozenset[Configuration]:
        res = self._closure.get(c)
        if res is None:
            res = update_closure(self.program, c)
            self._closure[c] = res
        return res

    def base_moves(self, c: Configuration) -> tuple[Configuration, ...]:
        """Successors of ``c`` by exactly one instruction, no updates."""
        res = self._base.get(c)
        if res is None:
            p = self.program
            res = tuple(_apply(c, l, p) for l in instruction_labels(p, c))
            self._base[c] = res
        return res

    def landings(self, c: Configuration, mover: str) -> set[Configuration]:
        """Configurations the mover can leave for the opponent from ``c``."""
        pol = self.spec.policy(mover)
        pre = self.closure(c) if pol.can_before and any(c.buffers) else (c,)
        mids: set[Configuration] = set()
        for d in pre:
            mids.update(self.base_moves(d))
        if not pol.can_after:
            return mids
        out: set[Configuration] = set()
        for m in mids:
            if any(m.buffers):
                out.update(self.closure(m))
            else:
                out.add(m)
        return out

    def explore(self, keep: Callable[[Configuration, str], bool], max_nodes: int = MAX_NODES) -> RawGraph:
        root = (self.spec.initial, self.spec.first_mover)
        g = RawGraph(root)
        g.succ[root] = None
        todo = deque([root])
        while todo:
            node = todo.popleft()
            c, owner = node
            nxt_owner = other(owner)
            succ = []
            for d in self.landings(c, owner):
                if keep(d, nxt_owner):
                    v = (d, nxt_owner)
                    succ.append(v)
                    if v not in g.succ:
                        g.succ[v] = None
                        todo.append(v)
                        if len(g.succ) > max_nodes:
                            raise ArenaCapacityError(len(g.succ))
            g.succ[node] = succ
        return g


def complete_deadlocks(
    owner: list[str],
    edges: list[list[int]],
    final: set[int],
    convention: Deadlock,
    labels: list | None = None,
) -> SafetyGame:
    """Give every deadlocked node a move into a sink gadget, then freeze the arena.

    Under ``LOSES`` a deadlocked A-node reaches a final sink and a deadlocked
    B-node a non-final 2-cycle; under ``SAFE`` both reach the non-final cycle.
    ``labels`` (if given) is extended with gadget labels for new nodes.
    """
    owner = list(owner)
    edges = [list(e) for e in edges]
    final = set(final)
    dead = [u for u in range(len(owner)) if not edges[u]]
    gadgets: dict[str, int] = {}

    def gadget(name: str, who: str) -> int:
        if name not in gadgets:
            gadgets[name] = len(owner)
            owner.append(who)
            edges.append([])
            if labels is not None:
                labels.append(name)
        return gadgets[name]

    for u in dead:
        if owner[u] == A and convention is Deadlock.LOSES:
            b, f = gadget(LOSE_B, B), gadget(LOSE_F, A)
            edges[b], edges[f] = [f], [b]
            final.add(f)
            edges[u] = [b]
        elif owner[u] == A:
            sb, sa = gadget(SAFE_B, B), gadget(SAFE_A, A)
            edges[sb], edges[sa] = [sa], [sb]
            edges[u] = [sb]
        else:
            sa, sb = gadget(SAFE_A, A), gadget(SAFE_B, B)
            edges[sa], edges[sb] = [sb], [sa]
            edges[u] = [sa]
    return SafetyGame(tuple(owner), tuple(tuple(sorted(e)) for e in edges), frozenset(final))


def finish(raw: RawGraph, program: Program, is_final: Callable[[Hashable, str], bool], convention: Deadlock) -> Arena:
    """Assign NodeIds by canonical sort of node labels and complete deadlocks."""
    labels = sorted(raw.succ, key=lambda n: (n[0], n[1]))
    lookup = {lab: i for i, lab in enumerate(labels)}
    owner = [lab[1] for lab in labels]
    edges = [sorted(lookup[v] for v in raw.succ[lab]) for lab in labels]
    final = {i for i, lab in enumerate(labels) if lab[1] == A and is_final(lab[0], lab[1])}
    all_labels: list = list(labels)
    game = complete_deadlocks(owner, edges, final, convention, all_labels)
    return Arena(game, all_labels, lookup[raw.root], program, lookup)


def final_predicate(program: Program) -> Callable[[Configuration, str], bool]:
    fsets = program.final_sets()

    def is_final(c: Configuration, owner: str) -> bool:
        return owner == A and any(s in f for s, f in zip(c.states, fsets))

    return is_final


def explore_bounded(spec: GameSpec, bound: int) -> RawGraph:
    if buffer_size(spec.initial) > bound:
        raise ValueError(f"initial configuration has {buffer_size(spec.initial)} messages, above bound {bound}")
    return MoveGenerator(spec).explore(lambda d, _owner: buffer_size(d) <= bound)


def build_arena(spec: GameSpec) -> Arena:
    """Explicit arena of the game restricted to configurations within ``buffer_bound``."""
    if spec.buffer_bound is None:
        raise ValueError("build_arena needs a buffer_bound")
    raw = explore_bounded(spec, spec.buffer_bound)
    return finish(raw, spec.program, final_predicate(spec.program), spec.deadlock)


def bounded_family(spec: GameSpec, bounds: list[int]) -> dict[int, Arena]:
    """Arenas for several bounds from a single exploration at the largest one.

    The k-bounded arena is the reachable restriction of any larger bounded
    arena to nodes with at most k messages, so one exploration suffices.
    """
    top = max(bounds)
    raw = explore_bounded(spec, top)
    is_final = final_predicate(spec.program)
    out = {}
    for k in sorted(set(bounds)):
        sub = raw if k == top else raw.restrict(lambda n, k=k: buffer_size(n[0]) <= k)
        out[k] = finish(sub, spec.program, is_final, spec.deadlock)
    return out
