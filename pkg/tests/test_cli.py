import subprocess
import sys

import pytest

from tsogames.cli import run
from tsogames.game import load_arena

from conftest import NEEDS_UPDATE, SKIP_LOOP

PCS = "pcs v1\nmessages a\nstates q0 q1 q2\nq0 -> q1 : !a\nq1 -> q2 : ?a\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "skip.tso").write_text(SKIP_LOOP)
    (tmp_path / "fence.tso").write_text(NEEDS_UPDATE)
    (tmp_path / "bad.tso").write_text("tsogame v1\ndomain 0\nvars x\nprocess P\n init s\n s -> s : r z 0\n")
    (tmp_path / "chan.pcs").write_text(PCS)
    return tmp_path


def out_of(capsys, argv):
    code = run([str(a) for a in argv])
    return code, capsys.readouterr().out


def trailer(text):
    line = [l for l in text.splitlines() if l.startswith("RESULT ")][-1]
    return dict(kv.split("=") for kv in line.split()[1:])


def test_classify(capsys):
    assert out_of(capsys, ["classify", "--a", "always", "--b", "always"]) == (0, "I\n")
    assert out_of(capsys, ["classify", "--a", "after", "--b", "after"]) == (0, "III\n")


def test_check(files, capsys):
    code, out = out_of(capsys, ["check", files / "skip.tso"])
    assert code == 0 and out.startswith("ok: 1 processes")
    assert run(["check", str(files / "bad.tso")]) == 2
    assert "z" in capsys.readouterr().err


def test_solve_group4(files, capsys):
    code, out = out_of(capsys, ["solve", files / "skip.tso", "--a", "never", "--b", "never"])
    assert code == 0
    assert trailer(out) == {"winner": "B", "method": "GroupIV", "nodes": "2", "edges": "2"}


def test_solve_group3_needs_bound(files, capsys):
    code = run(["solve", str(files / "skip.tso"), "--a", "after", "--b", "after"])
    assert code == 3
    assert "undecidable" in capsys.readouterr().err
    code, out = out_of(capsys, ["solve", files / "skip.tso", "--a", "after", "--b", "after", "--bound", "1"])
    assert code == 0 and trailer(out)["method"] == "BoundedApprox"


def test_expect(files, capsys):
    assert out_of(capsys, ["solve", files / "fence.tso", "--a", "always", "--b", "before", "--expect", "A"])[0] == 0
    assert out_of(capsys, ["solve", files / "fence.tso", "--a", "after", "--b", "before", "--expect", "A"])[0] == 1


def test_witness_play(files, capsys):
    code, out = out_of(capsys, ["solve", files / "skip.tso", "--horizon", "4"])
    assert "witness: B_reached_final@1" in out


def test_emit_arena_and_play(files, capsys):
    dump = files / "a.game"
    code, out = out_of(capsys, ["emit-arena", files / "fence.tso", "--a", "always", "--bound", "1", "--emit", dump])
    assert code == 0
    g = load_arena(dump.read_text())
    t = trailer(out)
    assert (len(g.owner), g.num_edges) == (int(t["nodes"]), int(t["edges"]))
    index = (files / "a.game.index").read_text().splitlines()
    assert index[0].startswith(f"index v1 {len(g.owner)} initial ")
    start = index[0].split()[-1]
    code, out = out_of(capsys, ["play", dump, "--start", start, "--horizon", "20", "--expect", "A"])
    assert code == 0 and "A_survived_horizon" in out
    strat = files / "sa.txt"
    strat.write_text("# all A-nodes\n" + "".join(f"{u} {g.edges[u][0]}\n" for u in g.nodes if g.owner[u] == "A"))
    code, out = out_of(capsys, ["play", dump, "--sa", strat, "--start", start, "--horizon", "20"])
    assert code == 0 and out.startswith("verdict: ")


def test_emit_arena_needs_bound(files, capsys):
    assert run(["emit-arena", str(files / "skip.tso"), "--emit", str(files / "x")]) == 2


def test_view_game(files, capsys):
    code, out = out_of(capsys, ["view-game", files / "skip.tso", "--emit", files / "v.game"])
    assert code == 0 and trailer(out)["winner"] == "B"
    assert (files / "v.game.index").exists()
    assert run(["view-game", str(files / "skip.tso"), "--a", "always"]) == 2


def test_compare(files, capsys):
    code, out = out_of(capsys, ["compare", files / "fence.tso", "--a", "after", "--b", "before"])
    assert code == 0
    assert out.splitlines() == [f"PASS k={k} reduced=B bounded=B" for k in (2, 3, 4)]
    assert run(["compare", str(files / "skip.tso"), "--a", "after", "--b", "after"]) == 3


def test_compile_and_probe(files, capsys):
    code, out = out_of(capsys, ["compile-pcs", files / "chan.pcs", "--target", "q2"])
    assert code == 0 and out.startswith("tsogame v1")
    code, _ = out_of(capsys, ["compile-pcs", files / "chan.pcs", "--target", "q2", "--emit", files / "c.tso"])
    assert (files / "c.tso.markers").read_text().startswith("markers v1")
    assert run(["check", str(files / "c.tso")]) == 0
    capsys.readouterr()
    code, out = out_of(capsys, ["probe", files / "chan.pcs", "--target", "q2"])
    assert code == 0
    assert len(out.splitlines()) == 4 and all(l.startswith("PASS") for l in out.splitlines())
    assert run(["probe", str(files / "chan.pcs"), "--target", "nope"]) == 2


def test_usage_errors(files, capsys):
    assert run([]) == 2
    assert run(["solve", str(files / "skip.tso"), "--a", "sometimes"]) == 2
    assert run(["solve", str(files / "missing.tso")]) == 2


def test_deterministic_output(files, capsys):
    argv = ["solve", files / "fence.tso", "--a", "always", "--b", "never", "--horizon", "6"]
    assert out_of(capsys, argv) == out_of(capsys, argv)


def test_console_entry_point(files):
    res = subprocess.run(
        [sys.executable, "-m", "tsogames.cli", "classify", "--a", "before", "--b", "before"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0 and res.stdout == "II\n"
