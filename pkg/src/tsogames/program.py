"""Concurrent programs: processes, instructions, and the ``tsogame v1`` text format.

A program is a tuple of finite labeled transition systems over a shared set
of variables with a finite value domain.  Process ids are declaration indices;
states, variables and values are plain strings.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

FORMAT_HEADER = "tsogame v1"


@dataclass(frozen=True, order=True)
class Read:
    var: str
    val: str

    def __str__(self) -> str:
        return f"r {self.var} {self.val}"


@dataclass(frozen=True, order=True)
class Write:
    var: str
    val: str

    def __str__(self) -> str:
        return f"w {self.var} {self.val}"


@dataclass(frozen=True, order=True)
class Skip:
    def __str__(self) -> str:
        return "skip"


@dataclass(frozen=True, order=True)
class Fence:
    def __str__(self) -> str:
        return "mf"


Instruction = Union[Read, Write, Skip, Fence]

SKIP = Skip()
FENCE = Fence()


@dataclass(frozen=True)
class Process:
    name: str
    states: tuple[str, ...]
    transitions: tuple[tuple[str, Instruction, str], ...]
    init: str
    final: tuple[str, ...] = ()

    def outgoing(self, state: str) -> tuple[tuple[str, Instruction, str], ...]:
        return self._out.get(state, ())

    @property
    def _out(self) -> dict:
        # cached adjacency; frozen dataclass so stash via object.__setattr__
        try:
            return self.__dict__["_adj"]
        except KeyError:
            adj: dict[str, list] = {}
            for t in self.transitions:
                adj.setdefault(t[0], []).append(t)
            frozen = {k: tuple(v) for k, v in adj.items()}
            object.__setattr__(self, "_adj", frozen)
            return frozen


@dataclass(frozen=True)
class Program:
    processes: tuple[Process, ...]
    variables: tuple[str, ...]
    domain: tuple[str, ...]
    initial_memory: tuple[tuple[str, str], ...] = field(default=())

    @property
    def initial_global(self) -> dict[int, str]:
        return {i: p.init for i, p in enumerate(self.processes)}

    @property
    def final_states(self) -> frozenset[tuple[int, str]]:
        return frozenset((i, s) for i, p in enumerate(self.processes) for s in p.final)

    @property
    def var_index(self) -> dict[str, int]:
        try:
            return self.__dict__["_var_index"]
        except KeyError:
            idx = {v: i for i, v in enumerate(self.variables)}
            object.__setattr__(self, "_var_index", idx)
            return idx

    def memory_value(self, var: str) -> str:
        """Initial memory value of ``var`` (first domain value unless set)."""
        for v, val in self.initial_memory:
            if v == var:
                return val
        return self.domain[0]

    def final_sets(self) -> tuple[frozenset[str], ...]:
        try:
            return self.__dict__["_final_sets"]
        except KeyError:
            fs = tuple(frozenset(p.final) for p in self.processes)
            object.__setattr__(self, "_final_sets", fs)
            return fs


class ProgramSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ProgramSemanticError(ValueError):
    def __init__(self, message: str, token: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}: {token!r}")
        self.token = token
        self.line = line


def validate(p: Program) -> list[str]:
    """Return one diagnostic per violated program invariant (empty if well formed)."""
    diags: list[str] = []
    if not p.domain:
        diags.append("domain is empty")
    if not p.variables:
        diags.append("no variables declared")
    if len(set(p.domain)) != len(p.domain):
        diags.append("duplicate value in domain")
    if len(set(p.variables)) != len(p.variables):
        diags.append("duplicate variable")
    if not p.processes:
        diags.append("no processes declared")
    dom = set(p.domain)
    variables = set(p.variables)
    for var, val in p.initial_memory:
        if var not in variables:
            diags.append(f"init-mem: undeclared variable {var!r}")
        if val not in dom:
            diags.append(f"init-mem: value {val!r} outside domain")
    for i, proc in enumerate(p.processes):
        states = set(proc.states)
        if proc.init not in states:
            diags.append(f"process {i} ({proc.name}): initial state {proc.init!r} not declared")
        for s in proc.final:
            if s not in states:
                diags.append(f"process {i} ({proc.name}): final state {s!r} not declared")
        for src, instr, dst in proc.transitions:
            for s in (src, dst):
                if s not in states:
                    diags.append(f"process {i} ({proc.name}): unknown state {s!r}")
            if isinstance(instr, (Read, Write)):
                if instr.var not in variables:
                    diags.append(f"process {i} ({proc.name}): undeclared variable {instr.var!r}")
                if instr.val not in dom:
                    diags.append(f"process {i} ({proc.name}): value {instr.val!r} outside domain")
    return diags


def _parse_instruction(tokens: list[str], line_no: int, col: int) -> Instruction:
    if not tokens:
        raise ProgramSyntaxError("missing instruction", line_no, col)
    head = tokens[0]
    if head in ("r", "w"):
        if len(tokens) != 3:
            raise ProgramSyntaxError(f"'{head}' takes a variable and a value", line_no, col)
        return (Read if head == "r" else Write)(tokens[1], tokens[2])
    if head == "skip" and len(tokens) == 1:
        return SKIP
    if head == "mf" and len(tokens) == 1:
        return FENCE
    raise ProgramSyntaxError(f"bad instruction {' '.join(tokens)!r}", line_no, col)


class _ProcBuilder:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.states: list[str] = []
        self.init: str | None = None
        self.final: list[str] = []
        self.transitions: list[tuple[str, Instruction, str, int]] = []

    def note_state(self, s: str) -> None:
        if s not in self.states:
            self.states.append(s)


def parse_program(text: str) -> Program:
    """Parse the ``tsogame v1`` format.

    States are declared implicitly by ``init``, ``final`` and transition
    lines and stored in that canonical order.  Raises ``ProgramSyntaxError`` on
    malformed lines and ``ProgramSemanticError`` on undeclared variables,
    out-of-domain values or unknown states.
    """
    header_seen = False
    domain: list[str] | None = None
    variables: list[str] | None = None
    init_mem: list[tuple[str, str, int]] = []
    procs: list[_ProcBuilder] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        col = len(line) - len(line.lstrip()) + 1
        kw = tokens[0]
        if not header_seen:
            if tokens != ["tsogame", "v1"]:
                raise ProgramSyntaxError(f"expected header {FORMAT_HEADER!r}", line_no, col)
            header_seen = True
            continue
        if kw == "domain":
            if domain is not None or len(tokens) < 2:
                raise ProgramSyntaxError("domain must be declared once with at least one value", line_no, col)
            domain = tokens[1:]
        elif kw == "vars":
            if variables is not None or len(tokens) < 2:
                raise ProgramSyntaxError("vars must be declared once with at least one variable", line_no, col)
            variables = tokens[1:]
        elif kw == "init-mem":
            rest = tokens[1:]
            if not rest or len(rest) % 2:
                raise ProgramSyntaxError("init-mem takes <var> <value> pairs", line_no, col)
            init_mem.extend((rest[i], rest[i + 1], line_no) for i in range(0, len(rest), 2))
        elif kw == "process":
            if len(tokens) != 2:
                raise ProgramSyntaxError("process takes exactly one name", line_no, col)
            if any(b.name == tokens[1] for b in procs):
                raise ProgramSemanticError("duplicate process name", tokens[1], line_no)
            procs.append(_ProcBuilder(tokens[1], line_no))
        elif kw == "init":
            if not procs or len(tokens) != 2:
                raise ProgramSyntaxError("init must name one state inside a process block", line_no, col)
            procs[-1].init = tokens[1]
            procs[-1].note_state(tokens[1])
        elif kw == "final":
            if not procs:
                raise ProgramSyntaxError("final outside a process block", line_no, col)
            for s in tokens[1:]:
                procs[-1].final.append(s)
                procs[-1].note_state(s)
        elif len(tokens) >= 4 and tokens[1] == "->" and tokens[3] == ":":
            if not procs:
                raise ProgramSyntaxError("transition outside a process block", line_no, col)
            instr = _parse_instruction(tokens[4:], line_no, line.index(":") + 2)
            b = procs[-1]
            b.note_state(tokens[0])
            b.note_state(tokens[2])
            b.transitions.append((tokens[0], instr, tokens[2], line_no))
        else:
            raise ProgramSyntaxError(f"unrecognised line starting with {kw!r}", line_no, col)

    if not header_seen:
        raise ProgramSyntaxError(f"expected header {FORMAT_HEADER!r}", 1, 1)
    if domain is None:
        raise ProgramSyntaxError("missing domain declaration", 1, 1)
    if variables is None:
        raise ProgramSyntaxError("missing vars declaration", 1, 1)
    if not procs:
        raise ProgramSyntaxError("no process declared", 1, 1)

    dom = set(domain)
    var_set = set(variables)
    for var, val, ln in init_mem:
        if var not in var_set:
            raise ProgramSemanticError("undeclared variable", var, ln)
        if val not in dom:
            raise ProgramSemanticError("value outside domain", val, ln)

    processes = []
    for b in procs:
        if b.init is None:
            raise ProgramSemanticError("process has no init state", b.name, b.line)
        for src, instr, dst, ln in b.transitions:
            if isinstance(instr, (Read, Write)):
                if instr.var not in var_set:
                    raise ProgramSemanticError("undeclared variable", instr.var, ln)
                if instr.val not in dom:
                    raise ProgramSemanticError("value outside domain", instr.val, ln)
        # canonical state order: init, finals, then transition endpoints
        order = [b.init, *b.final]
        for src, _, dst, _ in b.transitions:
            order += [src, dst]
        processes.append(
            Process(
                name=b.name,
                states=tuple(dict.fromkeys(order)),
                transitions=tuple((s, i, d) for s, i, d, _ in b.transitions),
                init=b.init,
                final=tuple(dict.fromkeys(b.final)),
            )
        )
    prog = Program(
        processes=tuple(processes),
        variables=tuple(variables),
        domain=tuple(domain),
        initial_memory=tuple((v, val) for v, val, _ in init_mem),
    )
    diags = validate(prog)
    if diags:
        raise ProgramSemanticError("invalid program", diags[0])
    return prog


def format_program(p: Program) -> str:
    """Canonical emitter; ``parse_program(format_program(p)) == p`` for parsed programs."""
    lines = [FORMAT_HEADER, "domain " + " ".join(p.domain), "vars " + " ".join(p.variables)]
    if p.initial_memory:
        lines.append("init-mem " + " ".join(f"{v} {val}" for v, val in p.initial_memory))
    for proc in p.processes:
        lines.append(f"process {proc.name}")
        lines.append(f"  init {proc.init}")
        if proc.final:
            lines.append("  final " + " ".join(proc.final))
        declared = [proc.init, *proc.final]
        for src, instr, dst in proc.transitions:
            declared += [src, dst]
        # states that appear nowhere else would be dropped by the parser
        orphans = [s for s in proc.states if s not in declared]
        if orphans:
            raise ValueError(f"process {proc.name}: isolated states {orphans} cannot be printed")
        for src, instr, dst in proc.transitions:
            lines.append(f"  {src} -> {dst} : {instr}")
    return "\n".join(lines) + "\n"
