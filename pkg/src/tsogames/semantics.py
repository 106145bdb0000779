"""TSO operational semantics: configurations, labels, and the six transition rules.

Buffers are stored oldest-first: a write appends at the end, an update pops
index 0, and a read-own-write looks at the last entry on the variable.
"""
from __future__ import annotations

from collections import deque
from typing import NamedTuple, Union

from .program import Fence, Instruction, Program, Read, Skip, Write

Message = tuple[str, str]
Buffer = tuple[Message, ...]


class Configuration(NamedTuple):
    states: tuple[str, ...]
    buffers: tuple[Buffer, ...]
    memory: tuple[str, ...]  # aligned with Program.variables


class Instr(NamedTuple):
    proc: int
    instr: Instruction
    target: str  # destination local state; disambiguates nondeterministic edges


class Update(NamedTuple):
    proc: int


Label = Union[Instr, Update]


class MalformedConfiguration(ValueError):
    pass


class NotEnabled(ValueError):
    pass


def initial_configuration(p: Program, buffers: tuple[Buffer, ...] | None = None) -> Configuration:
    if buffers is None:
        buffers = tuple(() for _ in p.processes)
    return Configuration(
        states=tuple(proc.init for proc in p.processes),
        buffers=tuple(tuple(b) for b in buffers),
        memory=tuple(p.memory_value(v) for v in p.variables),
    )


def check_configuration(p: Program, c: Configuration) -> None:
    n = len(p.processes)
    if len(c.states) != n or len(c.buffers) != n:
        raise MalformedConfiguration("configuration arity does not match the program")
    if len(c.memory) != len(p.variables):
        raise MalformedConfiguration("memory not defined for exactly the declared variables")
    dom = set(p.domain)
    for i, proc in enumerate(p.processes):
        if c.states[i] not in proc.states:
            raise MalformedConfiguration(f"process {i} in unknown state {c.states[i]!r}")
        for var, val in c.buffers[i]:
            if var not in p.var_index or val not in dom:
                raise MalformedConfiguration(f"bad buffer message {(var, val)!r}")
    for val in c.memory:
        if val not in dom:
            raise MalformedConfiguration(f"memory value {val!r} outside domain")


def buffer_size(c: Configuration) -> int:
    return sum(len(b) for b in c.buffers)


def visible_value(p: Program, c: Configuration, proc: int, var: str) -> str:
    """Value process ``proc`` reads for ``var``: newest own pending write, else memory."""
    for v, val in reversed(c.buffers[proc]):
        if v == var:
            return val
    return c.memory[p.var_index[var]]


def instruction_enabled(p: Program, c: Configuration, proc: int, instr: Instruction) -> bool:
    if isinstance(instr, Read):
        return visible_value(p, c, proc, instr.var) == instr.val
    if isinstance(instr, Fence):
        return not c.buffers[proc]
    return True


def enabled(p: Program, c: Configuration, *, check: bool = True) -> list[Label]:
    """All labels whose rule premises hold at ``c``, in deterministic order."""
    if check:
        check_configuration(p, c)
    out: list[Label] = []
    for i, proc in enumerate(p.processes):
        for _, instr, dst in proc.outgoing(c.states[i]):
            if instruction_enabled(p, c, i, instr):
                out.append(Instr(i, instr, dst))
        if c.buffers[i]:
            out.append(Update(i))
    return out


def instruction_labels(p: Program, c: Configuration) -> list[Instr]:
    return [l for l in enabled(p, c, check=False) if isinstance(l, Instr)]


def _apply(c: Configuration, l: Label, p: Program) -> Configuration:
    i = l.proc
    if isinstance(l, Update):
        (var, val), rest = c.buffers[i][0], c.buffers[i][1:]
        buffers = c.buffers[:i] + (rest,) + c.buffers[i + 1:]
        k = p.var_index[var]
        memory = c.memory[:k] + (val,) + c.memory[k + 1:]
        return Configuration(c.states, buffers, memory)
    states = c.states[:i] + (l.target,) + c.states[i + 1:]
    if isinstance(l.instr, Write):
        buf = c.buffers[i] + ((l.instr.var, l.instr.val),)
        return Configuration(states, c.buffers[:i] + (buf,) + c.buffers[i + 1:], c.memory)
    return Configuration(states, c.buffers, c.memory)


def step(p: Program, c: Configuration, l: Label) -> Configuration:
    """Unique successor of ``c`` under ``l``; raises ``NotEnabled`` otherwise."""
    if isinstance(l, Update):
        if not c.buffers[l.proc]:
            raise NotEnabled(f"update of process {l.proc} with empty buffer")
        return _apply(c, l, p)
    proc = p.processes[l.proc]
    if (c.states[l.proc], l.instr, l.target) not in proc.outgoing(c.states[l.proc]):
        raise NotEnabled(f"no edge {c.states[l.proc]} -[{l.instr}]-> {l.target} in process {l.proc}")
    if not instruction_enabled(p, c, l.proc, l.instr):
        raise NotEnabled(f"premise of {l.instr} fails for process {l.proc}")
    return _apply(c, l, p)


def update(p: Program, c: Configuration, proc: int) -> Configuration:
    return step(p, c, Update(proc))


def update_closure(p: Program, c: Configuration) -> frozenset[Configuration]:
    """Every configuration reachable from ``c`` by zero or more updates."""
    seen = {c}
    todo = deque([c])
    while todo:
        cur = todo.popleft()
        for i, buf in enumerate(cur.buffers):
            if buf:
                nxt = _apply(cur, Update(i), p)
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
    return frozenset(seen)


def full_flush(p: Program, c: Configuration) -> frozenset[Configuration]:
    """Members of the update closure whose buffers are all empty."""
    return frozenset(d for d in update_closure(p, c) if not any(d.buffers))


def flush_all(p: Program, c: Configuration, order: list[int] | None = None) -> Configuration:
    """Drain every buffer, process by process (``order`` defaults to 0..n-1)."""
    for i in order if order is not None else range(len(c.buffers)):
        while c.buffers[i]:
            c = _apply(c, Update(i), p)
    return c


def format_configuration(p: Program, c: Configuration) -> str:
    states = ",".join(c.states)
    bufs = " | ".join(" ".join(f"{v}={val}" for v, val in b) for b in c.buffers)
    mem = " ".join(f"{v}={val}" for v, val in zip(p.variables, c.memory))
    return f"[{states}] buf=[{bufs}] mem=[{mem}]"
