"""Compile a perfect channel system into an A-TSO game (A updates always, B never).

Three processes over ``x_w``, ``x_r``, ``y``:

* ``P1`` simulates the control flow; its store buffer holds the channel as
  pairs ``<x_w,m><y,1>``.
* ``P2`` rotates the oldest committed message from ``x_w`` into ``x_r`` and
  polices the ``y`` protocol.
* ``P3`` punishes whoever is deadlocked in ``P1`` and ``P2``.

Turn discipline.  Every transition B is meant to take leads into a *hot*
state ``h`` that also has ``h -skip-> F`` with ``F`` final.  Whoever enters a
hot state hands the opponent that escape, so A must leave ``h`` on her very
next move, and A herself never enters one.  A's exits from hot states are
reads and fences whose premises need exactly the buffer updates the protocol
expects, so A cannot stall a simulation step by refusing to update.  B-only
*catch* transitions (reads into a final state) fire when A has committed a
message out of protocol.  Each simulated channel operation is therefore a
sequence of (B, A) move pairs and has even length.

The receive segment, with the updates A performs before each of her moves::

    B  P1 q -skip-> R.h             A  P1 R.h -r x_r bot-> R.wait
    B  P2 p0 -r x_r bot-> g0        A  P2 g0 -skip-> gq
    B  P2 gq -w x_r 0-> g1          A  [update <x_w,m>]  P2 g1 -r x_w m-> g2.m
    B  P2 g2.m -w x_r m-> g3.m      A  P2 g3.m -w x_w bot-> g4
    B  P2 g4 -skip-> g5             A  [flush P2]  P2 g5 -mf-> g6
    B  P1 R.wait -r x_r m-> R.got   A  P1 R.got -skip-> R.drain
    B  P2 g6 -skip-> g7             A  [update <y,1>]  P2 g7 -r y 1-> g8
    B  P2 g8 -w y 0-> g9            A  [flush P2]  P2 g9 -mf-> g10
    B  P2 g10 -r x_w bot-> g11      A  P2 g11 -w x_r bot-> g12
    B  P2 g12 -skip-> g13           A  [flush P2]  P2 g13 -mf-> p0
    B  P1 R.drain -r x_r bot-> R.done   A  P1 R.done -skip-> q'

P2's own writes sit in P2's buffer until A flushes them at the fences in
``g5``, ``g9`` and ``g13``.  The ``y`` check happens as catches ``r y 1`` in
``p0``, ``g2.m``, ``g4`` and ``g6``: committing ``<y,1>`` before B opens the
window at ``g6 -> g7`` (for instance together with ``<x_w,m>``, or by
committing two channel messages at once) is caught.  The post-window check
is the catch ``g10 -r x_w m-> F``.  ``R.drain`` keeps P1 blocked until the
rotation has reset ``x_r`` to ``bot`` in memory, so no message is received
twice.

A may refuse a rotation request at ``g1`` with the fence ``g1 -mf-> e``,
which publishes the buffered claim flag ``x_r = 0``.  While the flag is
visible a P1 process waiting for a message may challenge with
``R.wait -r x_r 0-> R.verify``; A must answer with a fence in P1, committing
the whole channel, which enables the catches in ``e`` unless the channel was
empty.  P1 only enters ``R.wait`` when ``x_r = bot`` (otherwise it parks in
``R.hold``), so refusing is safe exactly when no receive was pending at the
time of the request.  B withdraws the flag with ``e -w x_r bot-> eh`` and A
flushes it at ``eh -mf-> p0``.

Known gap: nothing forces P1 to read ``x_r`` before P2 finishes a rotation,
so B can drop the head of the channel by asking for a receive of a different
message.  The compiled game therefore behaves like a channel that B may make
lossy at the head.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .arena import Deadlock, GameSpec, MoveGenerator, UpdatePolicy
from .game import A, B, Play
from .pcs import Nop, Pcs, PcsConfig, PcsTransition, Recv, Send, run_configs
from .program import FENCE, SKIP, Instruction, Process, Program, Read, Write
from .semantics import Configuration, Instr, Update, _apply, buffer_size, step

XW, XR, Y = "x_w", "x_r", "y"
BOT = "bot"
CLAIM = "0"
RESERVED = ("0", "1", BOT)

P1, P2, P3 = 0, 1, 2

P1_CAUGHT = "caught"
P2_CAUGHT = "caught"
P3_INIT, P3_MID, P3_WIN_A, P3_WIN_B = "t0", "mid", "winA", "winB"
P2_IDLE = "p0"

RECV_SEGMENT = 22


def q_state(q: str) -> str:
    return f"q.{q}"


@dataclass
class CompiledGame:
    spec: GameSpec
    pcs: Pcs
    target: str
    role_map: dict  # PCS state -> P1 state; transition index -> named P1 states
    markers: dict = field(default_factory=dict)  # name -> (process, state)

    @property
    def program(self) -> Program:
        return self.spec.program


class _Proc:
    def __init__(self, name: str, init: str):
        self.name = name
        self.init = init
        self.trans: list[tuple[str, Instruction, str]] = []
        self.final: list[str] = []

    def add(self, src: str, instr: Instruction, dst: str) -> None:
        t = (src, instr, dst)
        if t not in self.trans:
            self.trans.append(t)

    def hot(self, state: str, caught: str) -> None:
        self.add(state, SKIP, caught)

    def build(self) -> Process:
        order = [self.init, *self.final]
        for s, _, d in self.trans:
            order += [s, d]
        return Process(self.name, tuple(dict.fromkeys(order)), tuple(self.trans), self.init, tuple(self.final))


def _p1(l: Pcs, target: str, role_map: dict) -> Process:
    p = _Proc("P1", q_state(l.init))
    for q in l.states:
        role_map[q] = q_state(q)
    for i, t in enumerate(l.transitions):
        src, dst = q_state(t.src), q_state(t.dst)
        h = f"t{i}.h"
        if isinstance(t.op, Nop):
            p.add(src, SKIP, h)
            p.add(h, SKIP, dst)
            role_map[i] = {"hot": h}
            p.hot(h, P1_CAUGHT)
        elif isinstance(t.op, Send):
            p.add(src, Write(XW, t.op.msg), h)
            p.add(h, Write(Y, "1"), dst)
            role_map[i] = {"hot": h}
            p.hot(h, P1_CAUGHT)
        else:
            m = t.op.msg
            names = {k: f"t{i}.{k}" for k in ("wait", "hold", "rehot", "got", "drain", "done", "verify", "verified")}
            names["hot"] = h
            role_map[i] = names
            p.add(src, SKIP, h)
            p.add(h, Read(XR, BOT), names["wait"])
            # a claim is in progress: wait until it is withdrawn
            p.add(h, Read(XR, CLAIM), names["hold"])
            p.add(names["hold"], Read(XR, BOT), names["rehot"])
            p.add(names["rehot"], SKIP, names["wait"])
            p.add(names["wait"], Read(XR, m), names["got"])
            p.add(names["got"], SKIP, names["drain"])
            p.add(names["drain"], Read(XR, BOT), names["done"])
            p.add(names["done"], SKIP, dst)
            p.add(names["wait"], Read(XR, CLAIM), names["verify"])
            p.add(names["verify"], FENCE, names["verified"])
            for hs in (h, names["rehot"], names["got"], names["done"], names["verify"]):
                p.hot(hs, P1_CAUGHT)
    tq = q_state(target)
    p.add(tq, SKIP, tq)
    p.add(P1_CAUGHT, SKIP, P1_CAUGHT)
    p.final = [tq, P1_CAUGHT]
    return p.build()


def _p2(messages: tuple[str, ...]) -> Process:
    p = _Proc("P2", P2_IDLE)
    c = P2_CAUGHT
    p.add(P2_IDLE, Read(Y, "1"), c)
    p.add(P2_IDLE, Read(XR, BOT), "g0")
    p.add("g0", SKIP, "gq")
    p.add("gq", Write(XR, CLAIM), "g1")
    for m in messages:
        p.add("g1", Read(XW, m), f"g2.{m}")
        p.add(f"g2.{m}", Read(Y, "1"), c)
        p.add(f"g2.{m}", Write(XR, m), f"g3.{m}")
        p.add(f"g3.{m}", Write(XW, BOT), "g4")
        p.hot(f"g3.{m}", c)
    # refusal: the fence publishes the claim flag x_r = 0
    p.add("g1", FENCE, "e")
    p.add("e", Read(Y, "1"), c)
    for m in messages:
        p.add("e", Read(XW, m), c)
    p.add("e", Write(XR, BOT), "eh")
    p.add("eh", FENCE, P2_IDLE)
    p.add("g4", Read(Y, "1"), c)
    p.add("g4", SKIP, "g5")
    p.add("g5", FENCE, "g6")
    p.add("g6", Read(Y, "1"), c)
    p.add("g6", SKIP, "g7")
    p.add("g7", Read(Y, "1"), "g8")
    p.add("g8", Write(Y, "0"), "g9")
    p.add("g9", FENCE, "g10")
    for m in messages:
        p.add("g10", Read(XW, m), c)
    p.add("g10", Read(XW, BOT), "g11")
    p.add("g11", Write(XR, BOT), "g12")
    p.add("g12", SKIP, "g13")
    p.add("g13", FENCE, P2_IDLE)
    for hs in ("g0", "g1", "eh", "g5", "g7", "g9", "g11", "g13"):
        p.hot(hs, c)
    p.add(c, SKIP, c)
    p.final = [c]
    return p.build()


def _p3() -> Process:
    p = _Proc("P3", P3_INIT)
    p.add(P3_INIT, SKIP, P3_MID)
    p.add(P3_MID, SKIP, P3_WIN_A)
    p.add(P3_MID, SKIP, P3_WIN_B)
    p.add(P3_WIN_A, SKIP, P3_WIN_A)
    p.add(P3_WIN_B, SKIP, P3_WIN_B)
    p.final = [P3_WIN_B]
    return p.build()


def compile_pcs(l: Pcs, target: str) -> CompiledGame:
    if target not in l.states:
        raise ValueError(f"target {target!r} is not a state of the channel system")
    clash = [m for m in l.messages if m in RESERVED]
    if clash:
        raise ValueError(f"message names {clash} collide with reserved values {RESERVED}")
    role_map: dict = {}
    procs = (_p1(l, target, role_map), _p2(l.messages), _p3())
    program = Program(
        processes=procs,
        variables=(XW, XR, Y),
        domain=tuple(l.messages) + RESERVED,
        initial_memory=((XW, BOT), (XR, BOT), (Y, "0")),
    )
    spec = GameSpec(
        program,
        policy_a=UpdatePolicy.ALWAYS,
        policy_b=UpdatePolicy.NEVER,
        first_mover=B,
        deadlock=Deadlock.LOSES,
    )
    markers = {
        "rotation_start": (P2, "g1"),
        "y_check": (P2, "g6"),
        "b_win_catch": (P2, P2_CAUGHT),
        "p3_intermediate": (P3, P3_MID),
        "p3_winA": (P3, P3_WIN_A),
        "p3_winB": (P3, P3_WIN_B),
    }
    return CompiledGame(spec, l, target, role_map, markers)


def format_markers(cg: CompiledGame) -> str:
    lines = ["markers v1"]
    for name, (proc, state) in cg.markers.items():
        lines.append(f"{name} {cg.program.processes[proc].name} {state}")
    lines.append(f"target {cg.program.processes[P1].name} {q_state(cg.target)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# canonical plays

@dataclass
class CanonicalPlay:
    play: Play  # prefix of (Configuration, owner) nodes
    segments: list  # (start index, end index, PcsTransition)
    rotated: list  # messages that passed through x_r, in order
    bound: int
    xr_trace: list = field(default_factory=list)

    @property
    def nodes(self) -> list:
        return self.play.prefix


class ArenaBoundExceeded(ValueError):
    def __init__(self, needed: int, bound: int):
        super().__init__(f"play needs {needed} buffered messages, bound is {bound}")
        self.needed = needed


class _Walker:
    """Drives plays through the implicit bounded arena, validating every move."""

    def __init__(self, cg: CompiledGame, bound: Optional[int]):
        self.cg = cg
        self.p = cg.program
        self.bound = bound
        self.gen = MoveGenerator(cg.spec)
        self.is_final_state = cg.program.final_sets()

    def final(self, c: Configuration, owner: str) -> bool:
        return owner == A and any(s in f for s, f in zip(c.states, self.is_final_state))

    def b_move(self, c: Configuration, proc: int, instr: Instruction, target: str) -> Configuration:
        return step(self.p, c, Instr(proc, instr, target))

    def a_move(self, c: Configuration, before: list[int], proc: int, instr: Instruction, target: str,
               after: tuple = ()) -> Configuration:
        d = c
        for i in before:
            d = step(self.p, d, Update(i))
        d = step(self.p, d, Instr(proc, instr, target))
        for i in after:
            d = step(self.p, d, Update(i))
        return d

    def check_edge(self, c: Configuration, owner: str, d: Configuration) -> None:
        if self.bound is not None and buffer_size(d) > self.bound:
            raise ArenaBoundExceeded(buffer_size(d), self.bound)
        if d not in self.gen.landings(c, owner):
            raise AssertionError("scripted move is not an arena edge")


def _channel_high_water(l: Pcs, run: list[PcsTransition]) -> int:
    return max(len(c.channel) for c in run_configs(l, PcsConfig(l.init, ()), run))


def canonical_bound(l: Pcs, run: list[PcsTransition]) -> int:
    return 2 * _channel_high_water(l, run) + 2


def canonical_play(cg: CompiledGame, run: list[PcsTransition], bound: Optional[int] = None) -> CanonicalPlay:
    """Replay a PCS run with B choosing the simulated steps and A cooperating.

    Raises ``ValueError`` for an invalid run and ``ArenaBoundExceeded`` when a
    move would leave the bounded arena.
    """
    l = cg.pcs
    run_configs(l, PcsConfig(l.init, ()), run)  # validates the run
    if bound is None:
        bound = canonical_bound(l, run)
    w = _Walker(cg, bound)
    index = {t: i for i, t in enumerate(l.transitions)}
    c = cg.spec.initial
    nodes = [(c, B)]
    segments = []

    def b(proc, instr, target):
        nonlocal c
        d = w.b_move(c, proc, instr, target)
        w.check_edge(c, B, d)
        c = d
        nodes.append((c, A))

    def a(before, proc, instr, target, after=()):
        nonlocal c
        d = w.a_move(c, before, proc, instr, target, after)
        w.check_edge(c, A, d)
        c = d
        nodes.append((c, B))

    for t in run:
        start = len(nodes) - 1
        names = cg.role_map[index[t]]
        dst = q_state(t.dst)
        if isinstance(t.op, Nop):
            b(P1, SKIP, names["hot"])
            a([], P1, SKIP, dst)
        elif isinstance(t.op, Send):
            b(P1, Write(XW, t.op.msg), names["hot"])
            a([], P1, Write(Y, "1"), dst)
        else:
            m = t.op.msg
            b(P1, SKIP, names["hot"]);               a([], P1, Read(XR, BOT), names["wait"])
            b(P2, Read(XR, BOT), "g0");              a([], P2, SKIP, "gq")
            b(P2, Write(XR, CLAIM), "g1");           a([P1], P2, Read(XW, m), f"g2.{m}")
            b(P2, Write(XR, m), f"g3.{m}");          a([], P2, Write(XW, BOT), "g4")
            b(P2, SKIP, "g5");                       a([P2, P2, P2], P2, FENCE, "g6")
            b(P1, Read(XR, m), names["got"]);        a([], P1, SKIP, names["drain"])
            b(P2, SKIP, "g7");                       a([P1], P2, Read(Y, "1"), "g8")
            b(P2, Write(Y, "0"), "g9");              a([P2], P2, FENCE, "g10")
            b(P2, Read(XW, BOT), "g11");             a([], P2, Write(XR, BOT), "g12")
            b(P2, SKIP, "g13");                      a([P2], P2, FENCE, P2_IDLE)
            b(P1, Read(XR, BOT), names["done"]);     a([], P1, SKIP, dst)
        segments.append((start, len(nodes) - 1, t))

    final_index = next((i for i, (cc, o) in enumerate(nodes) if w.final(cc, o)), None)
    if final_index is None and c.states[P1] == q_state(cg.target):
        # B idles on the target's self-loop; the A-node it lands on is final
        b(P1, SKIP, q_state(cg.target))
        final_index = len(nodes) - 1 if w.final(*nodes[-1]) else None

    k = cg.program.var_index[XR]
    xr_trace = [cc.memory[k] for cc, _ in nodes]
    rotated = [v for prev, v in zip(xr_trace, xr_trace[1:]) if v != prev and v != BOT]
    return CanonicalPlay(Play(nodes, final_index), segments, rotated, bound, xr_trace)


# ---------------------------------------------------------------------------
# gadget probes

@dataclass
class ProbeResult:
    name: str
    passed: bool
    detail: str
    prefix: list = field(default_factory=list)


def _idle(cg: CompiledGame, p1_state: str, p1_buffer=(), **memory) -> Configuration:
    p = cg.program
    mem = {XW: BOT, XR: BOT, Y: "0"}
    mem.update(memory)
    return Configuration(
        (p1_state, P2_IDLE, P3_INIT),
        (tuple(p1_buffer), (), ()),
        tuple(mem[v] for v in p.variables),
    )


def _final_moves(w: _Walker, c: Configuration, proc: int) -> list[Configuration]:
    """B-moves of process ``proc`` from ``c`` that land in a final node (B never updates)."""
    out = []
    for lab in _b_labels(w, c):
        if lab.proc == proc:
            d = step(w.p, c, lab)
            if d.states[P2] == P2_CAUGHT and w.final(d, A):
                out.append(d)
    return out


def _quiet_p1_state(cg: CompiledGame, w: _Walker) -> str:
    """A P1 state that is neither final nor hot, so only P2 decides the outcome."""
    finals = w.is_final_state[P1]
    proc = cg.program.processes[P1]
    hot = {src for src, instr, dst in proc.transitions if dst == P1_CAUGHT and src != P1_CAUGHT}
    for s in (q_state(cg.pcs.init), *proc.states):
        if s not in finals and s not in hot:
            return s
    return q_state(cg.pcs.init)


def _probe_y_protocol(cg: CompiledGame, w: _Walker, name: str, buffer: list, updates: int, m: str) -> ProbeResult:
    c0 = _idle(cg, _quiet_p1_state(cg, w), buffer)
    ca = w.b_move(c0, P2, Read(XR, BOT), "g0")
    cb = w.a_move(ca, [], P2, SKIP, "gq")
    c1 = w.b_move(cb, P2, Write(XR, CLAIM), "g1")
    request = [(c0, B), (ca, A), (cb, B), (c1, A)]
    honest = w.a_move(c1, [P1], P2, Read(XW, buffer[0][1]), f"g2.{buffer[0][1]}")
    if _final_moves(w, honest, P2):
        return ProbeResult(name, False, "catch enabled after an in-protocol update", request + [(honest, B)])
    bad = w.a_move(c1, [P1] * updates, P2, Read(XW, m), f"g2.{m}")
    wins = _final_moves(w, bad, P2)
    prefix = request + [(bad, B)]
    if not wins:
        return ProbeResult(name, False, "B has no move into a final node", prefix)
    prefix.append((wins[0], A))
    b_moves = sum(1 for _, owner in prefix[:-1] if owner == B)
    return ProbeResult(name, True, f"B reaches a final node with its move number {b_moves}", prefix)


def _recv_names(cg: CompiledGame) -> Optional[dict]:
    for i, t in enumerate(cg.pcs.transitions):
        if isinstance(t.op, Recv):
            return cg.role_map[i]
    return None


def _a_refuses_and_survives(w: _Walker, c: Configuration, horizon: int = 200) -> tuple[bool, list]:
    """Explore every B-choice while A only loops in P3's winA state without updating."""
    seen = {c}
    frontier = [c]
    for _ in range(horizon):
        nxt = []
        for cb in frontier:
            for lab_c in (step(w.p, cb, lab) for lab in _b_labels(w, cb)):
                if w.final(lab_c, A):
                    return False, [(cb, B), (lab_c, A)]
                if lab_c.states[P3] != P3_WIN_A:
                    return False, [(cb, B), (lab_c, A)]
                ca = step(w.p, lab_c, Instr(P3, SKIP, P3_WIN_A))
                if ca not in seen:
                    seen.add(ca)
                    nxt.append(ca)
        if not nxt:
            return True, []
        frontier = nxt
    return True, []


def _b_labels(w: _Walker, c: Configuration) -> list[Instr]:
    from .semantics import instruction_labels

    return instruction_labels(w.p, c)


def probe_gadgets(cg: CompiledGame) -> list[ProbeResult]:
    w = _Walker(cg, None)
    out = []
    msgs = cg.pcs.messages
    if not msgs:
        na = "not applicable: the channel system has no messages"
        return [ProbeResult(n, True, na) for n in ("double-update", "solo-rotation", "duplication", "deadlock")]
    m1 = msgs[0]
    m2 = msgs[1] if len(msgs) > 1 else msgs[0]

    # (1) A commits two channel messages without a rotation in between
    buf = [(XW, m1), (Y, "1"), (XW, m2), (Y, "1")]
    out.append(_probe_y_protocol(cg, w, "double-update", buf, 3, m2))
    # (2) A commits <x_w,m> and its <y,1> on her own
    out.append(_probe_y_protocol(cg, w, "solo-rotation", [(XW, m1), (Y, "1")], 2, m1))

    # (3) second receive before the rotation finished: x_r still holds the message
    names = _recv_names(cg)
    if names is None:
        out.append(ProbeResult("duplication", True, "not applicable: the channel system has no receive transition"))
    else:
        c3 = _idle(cg, names["drain"], **{XR: m1})
        moves = [l for l in _b_labels(w, c3) if l.proc != P3]
        if moves:
            out.append(ProbeResult("duplication", False, f"B can still move: {moves}", [(c3, B)]))
        else:
            ca = w.b_move(c3, P3, SKIP, P3_MID)
            cb = w.a_move(ca, [], P3, SKIP, P3_WIN_A)
            ok, bad = _a_refuses_and_survives(w, cb)
            out.append(ProbeResult(
                "duplication", ok,
                "P1 blocked while x_r != bot; B forced into P3, A holds winA" if ok else "final reached",
                [(c3, B), (ca, A), (cb, B)] + bad,
            ))

    # (4) a player with no move in P1 and P2 must use P3, which hands the win to the opponent
    blocked = _blocked_p1_state(cg, w, m1)
    if blocked is None:
        out.append(ProbeResult("deadlock", True, "not applicable: every P1 state has an enabled move"))
        return out
    c4 = _idle(cg, blocked, **{XR: m1})
    ca = w.b_move(c4, P3, SKIP, P3_MID)
    cb = w.a_move(ca, [], P3, SKIP, P3_WIN_A)
    ok_b, bad = _a_refuses_and_survives(w, cb)
    # the same configuration with A to move: her only move opens P3 and B takes winB
    a_moves = [l for l in _b_labels(w, c4) if l.proc != P3]
    cm = w.a_move(c4, [], P3, SKIP, P3_MID)
    cf = w.b_move(cm, P3, SKIP, P3_WIN_B)
    ok_a = not a_moves and w.final(cf, A)
    out.append(ProbeResult(
        "deadlock", ok_a and ok_b,
        f"blocked at {blocked}; B deadlocked -> A wins: {ok_b}; A deadlocked -> B wins: {ok_a}",
        [(c4, B), (ca, A), (cb, B)] + bad if not ok_b else [(c4, A), (cm, B), (cf, A)],
    ))
    return out


def _blocked_p1_state(cg: CompiledGame, w: _Walker, m: str) -> Optional[str]:
    """A non-final P1 state with no enabled instruction while x_r holds ``m``."""
    finals = w.is_final_state[P1]
    for s in cg.program.processes[P1].states:
        if s in finals:
            continue
        c = _idle(cg, s, **{XR: m})
        if not [l for l in _b_labels(w, c) if l.proc == P1]:
            return s
    return None
