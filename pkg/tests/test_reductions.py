import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsogames.arena import GameSpec, Group, UpdatePolicy, build_arena, classify
from tsogames.corpus import random_configuration, random_program
from tsogames.game import A, B
from tsogames.program import FENCE, Read, Write, parse_program
from tsogames.reductions import (
    UndecidableVariant,
    WrongGroup,
    build_view_game,
    compare_with_bounded,
    group1_roles,
    group2_bound,
    is_write_acyclic,
    max_write_growth,
    reduce_group1,
    reduce_group2,
    solve_tso,
    view_enabled,
    view_of,
    view_step,
    winner_of,
)
from tsogames.semantics import Configuration, buffer_size, enabled, initial_configuration, step, Instr

P = UpdatePolicy
GROUP1 = [(a, b) for a in P for b in P if classify(a, b) is Group.I]

XY = parse_program("""tsogame v1
domain 0 1 2
vars x y
process P
  init s
  s -> t : w x 1
  s -> t : mf
process Q
  init u
  u -> u : skip
""")

# A must pass a fence behind B's buffered write; B wins when A cannot commit it in time
STALE = parse_program("""tsogame v1
domain 0 1
vars x
process W
  init a0
  a0 -> a1 : w x 1
  a1 -> a2 : mf
  a2 -> a2 : skip
""")
STALE_WINNERS = {(P.AFTER, P.BEFORE): B, (P.AFTER, P.ALWAYS): B}

# committing P's write disables Q's read of the old value
FLUSH_DISABLES = parse_program("""tsogame v1
domain 0 1
vars x y
process P
  init p0
  p0 -> p1 : w x 1
  p1 -> p2 : w y 1
  p2 -> p2 : skip
process Q
  init q0
  final q2
  q0 -> q1 : r y 1
  q1 -> q2 : r x 0
  q0 -> q0 : skip
  q1 -> q1 : skip
""")


def cfg(pbuf=(), mem=("0", "0")):
    return Configuration(("s", "u"), (tuple(pbuf), ()), tuple(mem))


def test_view_of_empty_buffers():
    v = view_of(XY, cfg(mem=("1", "2")))
    assert v.values == (("1", "2"), ("1", "2"))
    assert v.fence_ok == (True, True)


def test_view_of_newest_write():
    v = view_of(XY, cfg(pbuf=[("x", "1"), ("x", "2")]))
    assert v.value(XY, 0, "x") == "2"
    assert v.value(XY, 1, "x") == "0"
    assert v.fence_ok == (False, True)


def test_view_equivalent_pair_with_different_buffers():
    # search the single-process buffers of length <= 2 for equal views
    entries = [(x, v) for x in XY.variables for v in XY.domain]
    bufs = [()] + [(e,) for e in entries] + list(itertools.product(entries, repeat=2))
    seen = {}
    pairs = []
    for b in bufs:
        v = view_of(XY, cfg(pbuf=b))
        if v in seen and seen[v] != b:
            pairs.append((seen[v], b))
        seen.setdefault(v, b)
    assert pairs
    assert view_of(XY, cfg(pbuf=[("x", "1")])) == view_of(XY, cfg(pbuf=[("y", "0"), ("x", "1")]))


def test_view_step_write_and_fence():
    v = view_of(XY, cfg())
    w = view_step(XY, v, 0, Write("x", "1"))
    assert w.value(XY, 0, "x") == "1" and w.value(XY, 1, "x") == "0"
    assert w.fence_ok == (False, True)
    assert w.states == ("t", "u")
    dirty = view_of(XY, cfg(pbuf=[("y", "1")]))
    assert view_step(XY, dirty, 0, FENCE) is None
    assert view_step(XY, v, 0, Read("x", "0")) is None  # no such edge


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_views_commute_with_steps(seed):
    rng = random.Random(seed)
    p = random_program(rng, n_procs=2, max_states=3, n_vars=2, domain=("0", "1", "2"))
    c = random_configuration(rng, p, max_msgs=4)
    v = view_of(p, c)
    en = set(l for l in enabled(p, c) if isinstance(l, Instr))
    for i, proc in enumerate(p.processes):
        for _, instr, dst in proc.outgoing(c.states[i]):
            lab = Instr(i, instr, dst)
            assert (lab in en) == view_enabled(p, v, i, instr)
            w = view_step(p, v, i, instr, dst)
            if lab in en:
                assert w == view_of(p, step(p, c, lab))
            else:
                assert w is None


def test_view_game_without_writes_matches_bound_zero(skip_loop):
    vg = build_view_game(GameSpec(skip_loop))
    raw = build_arena(GameSpec(skip_loop, buffer_bound=0))
    assert (len(vg.game.owner), vg.game.num_edges) == (len(raw.game.owner), raw.game.num_edges)
    assert vg.game.final == raw.game.final
    assert winner_of(vg) == winner_of(raw) == B


def test_view_game_read_own_write():
    p = parse_program("tsogame v1\ndomain 0 1\nvars x\nprocess P\n init s\n final u\n s -> t : w x 1\n t -> u : r x 1\n u -> u : skip\n")
    vg = build_view_game(GameSpec(p))
    assert winner_of(vg) == B
    states = {lab[0].states for lab in vg.labels if not isinstance(lab, str)}
    assert ("u",) in states


def test_view_game_requires_group4(skip_loop):
    with pytest.raises(WrongGroup):
        build_view_game(GameSpec(skip_loop, P.BEFORE, P.NEVER))


def test_group1_roles():
    assert group1_roles(P.ALWAYS, P.ALWAYS) == (A, B)
    assert group1_roles(P.AFTER, P.BEFORE) == (A, B)
    assert group1_roles(P.BEFORE, P.AFTER) == (B, A)
    assert group1_roles(P.BEFORE, P.ALWAYS) == (B, A)
    with pytest.raises(WrongGroup):
        group1_roles(P.AFTER, P.AFTER)


def test_group1_sizes():
    for pa, pb in GROUP1:
        spec = GameSpec(FLUSH_DISABLES, pa, pb)
        x, _ = group1_roles(pa, pb)
        arena = reduce_group1(spec)
        for lab in arena.labels:
            if isinstance(lab, str):
                continue
            c, owner = lab
            assert buffer_size(c) <= (2 if owner == x else 1)


@pytest.mark.parametrize("program", [STALE, FLUSH_DISABLES], ids=["stale", "flush-disables"])
@pytest.mark.parametrize("pa, pb", GROUP1, ids=[f"{a.value}-{b.value}" for a, b in GROUP1])
def test_group1_handcrafted_agreement(program, pa, pb):
    agr = compare_with_bounded(GameSpec(program, pa, pb))
    assert list(agr.oracle) == [2, 3, 4]
    assert agr.ok, agr.lines()
    if program is STALE:
        assert agr.reduced_winner == STALE_WINNERS.get((pa, pb), A)


def test_group2_bounds():
    assert group2_bound(initial_configuration(XY)) == 1
    buffers = ((("x", "1"), ("y", "1"), ("x", "2")), ())
    assert group2_bound(initial_configuration(XY, buffers)) == 3
    sol = solve_tso(GameSpec(XY, P.BEFORE, P.BEFORE))
    assert (sol.method, sol.bound) == ("GroupII", 1)
    with pytest.raises(WrongGroup):
        reduce_group2(GameSpec(XY, P.ALWAYS, P.BEFORE))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2))
def test_group2_agreement(seed, init_size):
    rng = random.Random(seed)
    p = random_program(rng, final_prob=0.4)
    bufs = tuple(tuple(b) for b in _random_buffers(rng, p, init_size))
    spec = GameSpec(p, P.BEFORE, P.BEFORE, initial=initial_configuration(p, bufs))
    agr = compare_with_bounded(spec)
    assert agr.ok, agr.lines()


def _random_buffers(rng, p, n):
    from tsogames.corpus import random_buffers

    return random_buffers(rng, p, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_group4_agreement_write_acyclic(seed):
    rng = random.Random(seed)
    p = random_program(rng, write_acyclic=True, final_prob=0.4)
    assert is_write_acyclic(p)
    agr = compare_with_bounded(GameSpec(p))
    assert agr.ok, agr.lines()


def test_max_write_growth():
    assert max_write_growth(FLUSH_DISABLES) == 2
    assert max_write_growth(STALE) == 1  # the write is not on the skip loop
    looping = parse_program("tsogame v1\ndomain 0 1\nvars x\nprocess P\n init s\n s -> s : w x 1\n")
    assert max_write_growth(looping) is None
    with pytest.raises(ValueError):
        compare_with_bounded(GameSpec(looping))


def test_solve_tso_dispatch(skip_loop):
    sol = solve_tso(GameSpec(skip_loop))
    assert (sol.winner, sol.method) == (B, "GroupIV")
    with pytest.raises(UndecidableVariant):
        solve_tso(GameSpec(skip_loop, P.AFTER, P.AFTER))
    sol = solve_tso(GameSpec(skip_loop, P.AFTER, P.AFTER, buffer_bound=1))
    assert sol.method == "BoundedApprox"
    with pytest.raises(UndecidableVariant):
        compare_with_bounded(GameSpec(skip_loop, P.NEVER, P.ALWAYS))


def test_method_matches_group():
    expected = {Group.I: "GroupI", Group.II: "GroupII", Group.III: "BoundedApprox", Group.IV: "GroupIV"}
    for pa, pb in itertools.product(P, P):
        sol = solve_tso(GameSpec(FLUSH_DISABLES, pa, pb, buffer_bound=2))
        assert sol.method == expected[classify(pa, pb)]
