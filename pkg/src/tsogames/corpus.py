"""Random programs, configurations and arenas for regression and agreement runs.

All generators take a ``random.Random``; ``rng_from_env`` seeds one from
``TSOGAME_SEED`` so corpus runs are reproducible.
"""
from __future__ import annotations

import os
import random

from .game import A, B, SafetyGame
from .program import FENCE, SKIP, Process, Program, Read, Write
from .semantics import Configuration, initial_configuration

DEFAULT_SEED = 20231


def rng_from_env(default: int = DEFAULT_SEED) -> random.Random:
    return random.Random(int(os.environ.get("TSOGAME_SEED", default)))


def random_instruction(rng: random.Random, variables, domain, weights=(3, 3, 1, 1)):
    kind = rng.choices("rwsf", weights=weights)[0]
    if kind == "r":
        return Read(rng.choice(variables), rng.choice(domain))
    if kind == "w":
        return Write(rng.choice(variables), rng.choice(domain))
    return SKIP if kind == "s" else FENCE


def random_program(
    rng: random.Random,
    n_procs: int = 2,
    max_states: int = 3,
    n_vars: int = 2,
    domain: tuple[str, ...] = ("0", "1"),
    max_out: int = 2,
    write_acyclic: bool = False,
    final_prob: float = 0.25,
    exact: bool = False,
) -> Program:
    """``exact`` uses exactly ``max_states`` states per process and ``n_vars`` variables."""
    variables = tuple(f"x{i}" for i in range(n_vars if exact else rng.randint(1, n_vars)))
    procs = []
    for i in range(n_procs):
        k = max_states if exact else rng.randint(1, max_states)
        states = [f"s{j}" for j in range(k)]
        trans = []
        for j, s in enumerate(states):
            for _ in range(rng.randint(1, max_out)):
                instr = random_instruction(rng, variables, domain)
                dst = rng.choice(states)
                t = (s, instr, dst)
                if t not in trans:
                    trans.append(t)
        if write_acyclic:
            trans = _drop_cyclic_writes(rng, trans, variables, domain)
        final = tuple(s for s in states[1:] if rng.random() < final_prob)
        order = [states[0], *final]
        for src, _, dst in trans:
            order += [src, dst]
        procs.append(
            Process(
                name=f"P{i}",
                states=tuple(dict.fromkeys(order)),
                transitions=tuple(trans),
                init=states[0],
                final=final,
            )
        )
    init_mem = tuple((v, rng.choice(domain)) for v in variables)
    return Program(tuple(procs), variables, tuple(domain), init_mem)


def _drop_cyclic_writes(rng, trans, variables, domain):
    """Turn every write lying on a cycle into a read."""
    def reaches(a, b):
        seen, todo = {a}, [a]
        while todo:
            u = todo.pop()
            if u == b:
                return True
            for s, _, d in trans:
                if s == u and d not in seen:
                    seen.add(d)
                    todo.append(d)
        return False

    out = []
    for s, instr, d in trans:
        if isinstance(instr, Write) and reaches(d, s):
            instr = Read(rng.choice(variables), rng.choice(domain))
        out.append((s, instr, d))
    return list(dict.fromkeys(out))


def random_buffers(rng: random.Random, p: Program, total: int) -> tuple:
    bufs = [[] for _ in p.processes]
    for _ in range(total):
        bufs[rng.randrange(len(bufs))].append((rng.choice(p.variables), rng.choice(p.domain)))
    return tuple(tuple(b) for b in bufs)


def random_configuration(rng: random.Random, p: Program, max_msgs: int = 3) -> Configuration:
    states = tuple(rng.choice(proc.states) for proc in p.processes)
    memory = tuple(rng.choice(p.domain) for _ in p.variables)
    bufs = random_buffers(rng, p, rng.randint(0, max_msgs))
    return Configuration(states, bufs, memory)


def random_arena(rng: random.Random, n: int, max_out: int = 4, final_prob: float = 0.1) -> SafetyGame:
    """Random bipartite, deadlock-free arena with ``n >= 2`` nodes."""
    owner = [A if i % 2 == 0 else B for i in range(n)]
    rng.shuffle(owner)
    if A not in owner or B not in owner:
        owner[0], owner[-1] = A, B
    a_nodes = [i for i in range(n) if owner[i] == A]
    b_nodes = [i for i in range(n) if owner[i] == B]
    edges = []
    for i in range(n):
        pool = b_nodes if owner[i] == A else a_nodes
        k = min(len(pool), rng.randint(1, max_out))
        edges.append(tuple(sorted(rng.sample(pool, k))))
    final = frozenset(i for i in a_nodes if rng.random() < final_prob)
    return SafetyGame(tuple(owner), tuple(edges), final)


def default_initial(p: Program) -> Configuration:
    return initial_configuration(p)


def random_pcs(rng: random.Random, n_states: int = 4, messages: tuple[str, ...] = ("a", "b"), n_trans: int = 7):
    """Random channel system with at least one send and one receive of each kind seen."""
    from .pcs import NOP, Pcs, PcsTransition, Recv, Send

    states = tuple(f"q{i}" for i in range(n_states))
    trans = [
        PcsTransition(states[0], Send(messages[0]), states[1 % n_states]),
        PcsTransition(rng.choice(states), Recv(messages[0]), rng.choice(states)),
    ]
    while len(trans) < n_trans:
        kind = rng.choice("sr n")
        m = rng.choice(messages)
        op = Send(m) if kind == "s" else Recv(m) if kind == "r" else NOP
        t = PcsTransition(rng.choice(states), op, rng.choice(states))
        if t not in trans:
            trans.append(t)
    return Pcs(states, tuple(messages), tuple(trans), states[0])


def dense_program(n_procs: int = 2, n_states: int = 4, n_vars: int = 2, domain: tuple[str, ...] = ("0", "1")) -> Program:
    """Every state offers every instruction; the largest arena for its size class.

    Instruction ``k`` from state ``j`` leads to state ``j + 1 + k`` (mod ``n_states``);
    the last state of the last process is final.
    """
    variables = tuple(f"x{i}" for i in range(n_vars))
    instrs = [Read(x, v) for x in variables for v in domain]
    instrs += [Write(x, v) for x in variables for v in domain] + [SKIP, FENCE]
    states = tuple(f"s{j}" for j in range(n_states))
    procs = []
    for i in range(n_procs):
        trans = tuple(
            (states[j], ins, states[(j + 1 + k) % n_states]) for j in range(n_states) for k, ins in enumerate(instrs)
        )
        final = (states[-1],) if i == n_procs - 1 else ()
        procs.append(Process(f"P{i}", states, trans, states[0], final))
    return Program(tuple(procs), variables, tuple(domain))
