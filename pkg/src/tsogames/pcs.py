"""Perfect channel systems: one unbounded, non-lossy FIFO channel plus finite control."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union


@dataclass(frozen=True, order=True)
class Send:
    msg: str

    def __str__(self) -> str:
        return f"! {self.msg}"


@dataclass(frozen=True, order=True)
class Recv:
    msg: str

    def __str__(self) -> str:
        return f"? {self.msg}"


@dataclass(frozen=True, order=True)
class Nop:
    def __str__(self) -> str:
        return "nop"


ChanOp = Union[Send, Recv, Nop]
NOP = Nop()


class PcsTransition(NamedTuple):
    src: str
    op: ChanOp
    dst: str


@dataclass(frozen=True)
class Pcs:
    states: tuple[str, ...]
    messages: tuple[str, ...]
    transitions: tuple[PcsTransition, ...]
    init: str

    def __post_init__(self):
        st = set(self.states)
        if self.init not in st:
            raise ValueError(f"initial state {self.init!r} not declared")
        for t in self.transitions:
            if t.src not in st or t.dst not in st:
                raise ValueError(f"transition {t} uses an undeclared state")
            if not isinstance(t.op, Nop) and t.op.msg not in self.messages:
                raise ValueError(f"transition {t} uses an undeclared message")

    def outgoing(self, state: str) -> list[PcsTransition]:
        return [t for t in self.transitions if t.src == state]


class PcsConfig(NamedTuple):
    state: str
    channel: tuple[str, ...]  # oldest first, i.e. the receive end is index 0


def pcs_step(l: Pcs, c: PcsConfig, t: PcsTransition) -> Optional[PcsConfig]:
    if t not in l.transitions:
        raise ValueError(f"{t} is not a transition of the channel system")
    if c.state != t.src:
        return None
    if isinstance(t.op, Send):
        return PcsConfig(t.dst, c.channel + (t.op.msg,))
    if isinstance(t.op, Recv):
        if not c.channel or c.channel[0] != t.op.msg:
            return None
        return PcsConfig(t.dst, c.channel[1:])
    return PcsConfig(t.dst, c.channel)


def run_configs(l: Pcs, c0: PcsConfig, run: list[PcsTransition]) -> list[PcsConfig]:
    """Configurations visited by ``run``; raises ``ValueError`` if a step is disabled."""
    out = [c0]
    for t in run:
        nxt = pcs_step(l, out[-1], t)
        if nxt is None:
            raise ValueError(f"run step {t} disabled at {out[-1]}")
        out.append(nxt)
    return out


def pcs_reach(l: Pcs, c0: PcsConfig, target: str, depth: int) -> Optional[list[PcsTransition]]:
    """Shortest run of length at most ``depth`` from ``c0`` into ``target`` (BFS)."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    parent: dict[PcsConfig, Optional[tuple[PcsConfig, PcsTransition]]] = {c0: None}
    frontier = deque([(c0, 0)])
    while frontier:
        c, d = frontier.popleft()
        if c.state == target:
            run = []
            while parent[c] is not None:
                c, t = parent[c]
                run.append(t)
            return run[::-1]
        if d == depth:
            continue
        for t in l.outgoing(c.state):
            nxt = pcs_step(l, c, t)
            if nxt is not None and nxt not in parent:
                parent[nxt] = (c, t)
                frontier.append((nxt, d + 1))
    return None


class PcsSyntaxError(ValueError):
    pass


def parse_pcs(text: str) -> Pcs:
    """Parse ``pcs v1``: ``messages``, ``state``/``states`` (first is initial unless
    ``init`` is given), and edges ``q -> q' : ! m | ? m | nop``."""
    header = False
    messages: list[str] = []
    states: list[str] = []
    init = None
    trans: list[PcsTransition] = []
    for n, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if not header:
            if toks != ["pcs", "v1"]:
                raise PcsSyntaxError(f"line {n}: expected header 'pcs v1'")
            header = True
        elif toks[0] == "messages":
            messages += toks[1:]
        elif toks[0] in ("state", "states"):
            states += [s for s in toks[1:] if s not in states]
        elif toks[0] == "init" and len(toks) == 2:
            init = toks[1]
        elif len(toks) >= 5 and toks[1] == "->" and toks[3] == ":":
            op_toks = toks[4:]
            if len(op_toks) == 1 and op_toks[0][0] in "!?" and len(op_toks[0]) > 1:
                op_toks = [op_toks[0][0], op_toks[0][1:]]
            if op_toks == ["nop"]:
                op: ChanOp = NOP
            elif len(op_toks) == 2 and op_toks[0] == "!":
                op = Send(op_toks[1])
            elif len(op_toks) == 2 and op_toks[0] == "?":
                op = Recv(op_toks[1])
            else:
                raise PcsSyntaxError(f"line {n}: bad channel operation {' '.join(op_toks)!r}")
            trans.append(PcsTransition(toks[0], op, toks[2]))
        else:
            raise PcsSyntaxError(f"line {n}: unrecognised line")
    if not header:
        raise PcsSyntaxError("missing header 'pcs v1'")
    if not states:
        raise PcsSyntaxError("no states declared")
    try:
        return Pcs(tuple(states), tuple(messages), tuple(trans), init or states[0])
    except ValueError as e:
        raise PcsSyntaxError(str(e)) from None


def format_pcs(l: Pcs) -> str:
    lines = ["pcs v1", "messages " + " ".join(l.messages), "states " + " ".join(l.states), f"init {l.init}"]
    lines += [f"{t.src} -> {t.dst} : {t.op}" for t in l.transitions]
    return "\n".join(lines) + "\n"
