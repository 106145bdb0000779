import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsogames.corpus import random_program
from tsogames.program import (
    SKIP,
    Process,
    Program,
    ProgramSemanticError,
    ProgramSyntaxError,
    Read,
    Write,
    format_program,
    parse_program,
    validate,
)

from conftest import SKIP_LOOP


def test_minimal_skip_loop(skip_loop):
    assert len(skip_loop.processes) == 1
    proc = skip_loop.processes[0]
    assert proc.states == ("s0",)
    assert proc.transitions == (("s0", SKIP, "s0"),)
    assert skip_loop.final_states == {(0, "s0")}


def test_write_is_echoed():
    p = parse_program("tsogame v1\ndomain 0 1\nvars x\nprocess P\n init s\n s -> t : w x 1\n")
    assert p.processes[0].transitions == (("s", Write("x", "1"), "t"),)


def test_undeclared_variable_names_token():
    with pytest.raises(ProgramSemanticError) as e:
        parse_program("tsogame v1\ndomain 0 1\nvars x\nprocess P\n init s\n s -> s : r z 0\n")
    assert e.value.token == "z"
    assert "z" in str(e.value)


def test_value_outside_domain():
    with pytest.raises(ProgramSemanticError) as e:
        parse_program("tsogame v1\ndomain 0 1\nvars x\nprocess P\n init s\n s -> s : w x 7\n")
    assert e.value.token == "7"


@pytest.mark.parametrize(
    "text, line",
    [
        ("tsogame v2\n", 1),
        ("tsogame v1\ndomain 0\nvars x\nprocess P\n init s\n s -> s : jump\n", 6),
        ("tsogame v1\ndomain 0\nvars x\n s -> s : skip\n", 4),
        ("tsogame v1\ndomain 0\nvars x\nprocess P\n init s\n s => s : skip\n", 6),
    ],
)
def test_syntax_errors_carry_line(text, line):
    with pytest.raises(ProgramSyntaxError) as e:
        parse_program(text)
    assert e.value.line == line


def test_comments_and_init_mem():
    p = parse_program("tsogame v1 # hdr\ndomain 0 1\nvars x y\ninit-mem y 1\nprocess P\n init s # start\n s -> s : mf\n")
    assert p.memory_value("x") == "0"
    assert p.memory_value("y") == "1"


def _two_procs(**over):
    p0 = Process("P", ("s", "t"), (("s", Read("x", "0"), "t"),), "s", ("t",))
    p1 = Process("Q", ("u",), (("u", SKIP, "u"),), "u")
    procs = over.get("procs", (p0, p1))
    return Program(procs, ("x",), ("0", "1"))


def test_validate_wellformed():
    assert validate(_two_procs()) == []


def test_validate_bad_final():
    p0 = Process("P", ("s",), (), "s", ("ghost",))
    assert len(validate(_two_procs(procs=(p0,)))) == 1


def test_validate_foreign_init():
    p0 = Process("P", ("s",), (), "s")
    p1 = Process("Q", ("u",), (), "s")  # Q's init is P's state
    assert len(validate(_two_procs(procs=(p0, p1)))) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    import random

    p = random_program(random.Random(seed), n_procs=3, max_states=4, n_vars=3, domain=("0", "1", "2"))
    text = format_program(p)
    q = parse_program(text)
    assert validate(q) == []
    assert q == p
    # parse fixes the canonical state order; a second round trip is the identity
    assert format_program(q) == text
    assert parse_program(format_program(q)) == q


def test_round_trip_fixed(skip_loop):
    assert parse_program(format_program(skip_loop)) == skip_loop
    assert format_program(skip_loop).splitlines()[0] == "tsogame v1"
