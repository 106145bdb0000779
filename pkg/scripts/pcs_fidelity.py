"""Compile random channel systems and replay reachability witnesses as canonical plays.

    python scripts/pcs_fidelity.py --instances 50 --depth 8
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, fields

from tsogames.compiler import canonical_play, compile_pcs, probe_gadgets
from tsogames.corpus import random_pcs, rng_from_env
from tsogames.pcs import PcsConfig, Recv, pcs_reach


@dataclass
class FidelityConfig:
    instances: int = 20
    depth: int = 6
    max_states: int = 5
    max_transitions: int = 9
    min_receives: int = 1


def run(cfg: FidelityConfig) -> int:
    rng = rng_from_env()
    bad = 0
    done = 0
    while done < cfg.instances:
        l = random_pcs(rng, n_states=rng.randint(3, cfg.max_states), n_trans=rng.randint(5, cfg.max_transitions))
        target = rng.choice(l.states[1:])
        run_ = pcs_reach(l, PcsConfig(l.init, ()), target, cfg.depth)
        if not run_ or sum(isinstance(t.op, Recv) for t in run_) < cfg.min_receives:
            continue
        done += 1
        cg = compile_pcs(l, target)
        cp = canonical_play(cg, run_)
        received = [t.op.msg for t in run_ if isinstance(t.op, Recv)]
        probes = probe_gadgets(cg)
        ok = (
            cp.play.b_reached_final
            and cp.rotated == received
            and all((e - s) % 2 == 0 for s, e, _ in cp.segments)
            and all(r.passed for r in probes)
        )
        bad += not ok
        print(f"{'ok  ' if ok else 'FAIL'} run={len(run_):2d} play={len(cp.nodes):4d} bound={cp.bound} "
              f"received={' '.join(received) or '-'} probes={''.join('+' if r.passed else '-' for r in probes)}")
    print(f"{done - bad}/{done} instances passed")
    return 1 if bad else 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(FidelityConfig):
        ap.add_argument("--" + f.name.replace("_", "-"), type=type(f.default), default=f.default)
    raise SystemExit(run(FidelityConfig(**vars(ap.parse_args()))))


if __name__ == "__main__":
    main()
