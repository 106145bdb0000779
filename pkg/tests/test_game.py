import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsogames.corpus import random_arena
from tsogames.game import (
    A,
    B,
    ArenaError,
    PositionalStrategy,
    SafetyGame,
    dump_arena,
    extract_strategies,
    load_arena,
    play,
    post_set,
    pre_set,
    solve,
)

from oracles import all_strategies, b_can_force_against, naive_attractor, reaches_final

# A at 0 picks between B-node 1 (which can move into final 3) and B-node 2 (which cannot)
SIX = SafetyGame(
    owner=(A, B, B, A, A, B),
    edges=((1, 2), (3, 4), (4,), (1,), (2, 5), (0,)),
    final=frozenset({3}),
)


def cycle(n=4):
    owner = tuple(A if i % 2 == 0 else B for i in range(n))
    return SafetyGame(owner, tuple(((i + 1) % n,) for i in range(n)), frozenset())


def test_post_pre_basic():
    assert post_set(SIX, set()) == set()
    assert pre_set(SIX, set()) == set()
    assert post_set(SIX, {0}) == {1, 2}
    assert pre_set(SIX, {4}) == {1, 2}
    g = cycle(6)
    assert post_set(g, set(g.nodes)) == set(g.nodes)
    assert pre_set(g, set(g.nodes)) == set(g.nodes)


def test_post_unknown_node():
    with pytest.raises(ArenaError):
        post_set(SIX, {6})
    with pytest.raises(ArenaError):
        pre_set(SIX, {-1})


def test_solve_trivial():
    g = cycle()
    assert solve(g).win_A == frozenset(g.nodes)
    g = SafetyGame(g.owner, g.edges, frozenset(u for u in g.nodes if g.owner[u] == A))
    assert solve(g).win_B == frozenset(g.nodes)


def test_solve_six_matches_fixpoint():
    r = solve(SIX)
    assert r.win_B == naive_attractor(SIX) == {1, 3}
    assert r.win_A == {0, 2, 4, 5}
    assert r.rank[3] == 0 and r.rank[1] == 1


def test_solve_rejects_bad_arenas():
    with pytest.raises(ArenaError, match="deadlocked"):
        solve(SafetyGame((A, B), ((1,), ()), frozenset()))
    with pytest.raises(ArenaError, match="alternate"):
        solve(SafetyGame((A, A), ((1,), (0,)), frozenset()))
    with pytest.raises(ArenaError, match="final"):
        solve(SafetyGame((A, B), ((1,), (0,)), frozenset({1})))


def test_strategies_on_six():
    r = solve(SIX)
    sa, sb = extract_strategies(SIX, r)
    assert sb(1) == 3 and r.rank[sb(1)] == 0
    assert sa(0) == 2  # the only successor in win_A
    assert sa(4) == 2
    for u in r.win_B:
        assert play(SIX, sa, sb, u, len(SIX.owner)).b_reached_final


def test_extract_rejects_inconsistent_regions():
    r = solve(SIX)
    bad = type(r)(win_A=r.win_A - {0}, win_B=r.win_B, rank=r.rank)
    with pytest.raises(ArenaError):
        extract_strategies(SIX, bad)


def test_play_verdicts():
    sa, sb = extract_strategies(SIX, solve(SIX))
    pl = play(SIX, sa, sb, 3, 5)
    assert pl.final_index == 0 and pl.verdict == "B_reached_final@0"
    g = cycle()
    sa, sb = extract_strategies(g, solve(g))
    pl = play(g, sa, sb, 0, 10)
    assert pl.verdict == "A_survived_horizon"
    assert len(pl.prefix) == 11
    for u, v in zip(pl.prefix, pl.prefix[1:]):
        assert v in g.edges[u]


def test_play_errors():
    g = cycle()
    sa, sb = extract_strategies(g, solve(g))
    with pytest.raises(ValueError):
        play(g, sa, sb, 0, 0)
    with pytest.raises(ArenaError):
        play(g, PositionalStrategy(A, {}), sb, 0, 3)
    with pytest.raises(ArenaError):
        play(g, PositionalStrategy(A, {0: 3, 2: 3}), sb, 0, 3)


def test_dump_format_and_round_trip():
    text = dump_arena(SIX)
    lines = text.splitlines()
    assert lines[0] == "game v1 6 9"
    assert lines[1] == "node 0 A -"
    assert lines[4] == "node 3 A final"
    assert lines[7] == "edge 0 1"
    assert load_arena(text) == SIX
    with pytest.raises(ArenaError):
        load_arena("game v1 2 5\nnode 0 A -\nnode 1 B -\nedge 0 1\nedge 1 0\n")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 60))
def test_solve_agrees_with_fixpoint(seed, n):
    g = random_arena(random.Random(seed), n, final_prob=0.15)
    r = solve(g)
    assert r.win_B == naive_attractor(g)
    assert r.win_A | r.win_B == set(g.nodes) and not (r.win_A & r.win_B)
    # local consistency
    for u in g.nodes:
        succ = set(g.edges[u])
        if u in r.win_A and u not in g.final:
            assert (succ & r.win_A) if g.owner[u] == A else succ <= r.win_A
        if u in r.win_B and u not in g.final:
            assert (succ & r.win_B) if g.owner[u] == B else succ <= r.win_B


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_extracted_strategies_beat_every_opponent(seed):
    rng = random.Random(seed)
    g = random_arena(rng, rng.randint(2, 12), max_out=2, final_prob=0.2)
    r = solve(g)
    sa, sb = extract_strategies(g, r)
    n = len(g.owner)
    for a_choice in all_strategies(g, A):
        for u in r.win_B:
            assert reaches_final(g, u, a_choice, sb.choice, n)
    for u in r.win_A:
        assert not b_can_force_against(g, u, sa.choice, 10 * n)
