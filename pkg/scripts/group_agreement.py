"""Reduced-game winners against brute-force bounded arenas over a random corpus.

    python scripts/group_agreement.py --group I --programs 100
    TSOGAME_SEED=7 python scripts/group_agreement.py --group IV
"""
from __future__ import annotations

import argparse
import time
from collections import Counter
from dataclasses import dataclass, fields

from tsogames.arena import GameSpec, Group, UpdatePolicy, classify
from tsogames.corpus import random_buffers, random_program, rng_from_env
from tsogames.reductions import compare_with_bounded
from tsogames.semantics import initial_configuration


@dataclass
class AgreementConfig:
    group: str = "I"
    programs: int = 100
    n_procs: int = 2
    max_states: int = 3
    n_vars: int = 2
    final_prob: float = 0.3
    init_buffers: int = 0  # Group II only: initial buffer size


def pairs_for(group: Group):
    return [(a, b) for a in UpdatePolicy for b in UpdatePolicy if classify(a, b) is group]


def run(cfg: AgreementConfig) -> int:
    group = Group(cfg.group)
    if group is Group.III:
        raise SystemExit("Group III has no finite reduction to compare")
    rng = rng_from_env()
    pairs = pairs_for(group)
    tally = Counter()
    t0 = time.perf_counter()
    for i in range(cfg.programs):
        p = random_program(
            rng, n_procs=cfg.n_procs, max_states=cfg.max_states, n_vars=cfg.n_vars,
            final_prob=cfg.final_prob, write_acyclic=group is Group.IV,
        )
        init = initial_configuration(p, random_buffers(rng, p, cfg.init_buffers)) if group is Group.II else None
        for pa, pb in pairs:
            agr = compare_with_bounded(GameSpec(p, pa, pb, initial=init))
            tally["agree" if agr.ok else "disagree"] += 1
            tally[f"winner {agr.reduced_winner}"] += 1
            if not agr.ok:
                print(f"program {i} ({pa.value}, {pb.value}):", *agr.lines(), sep="\n  ")
    dt = time.perf_counter() - t0
    print(f"group {group.value}: {cfg.programs} programs x {len(pairs)} pairs in {dt:.1f}s")
    for k in sorted(tally):
        print(f"  {k}: {tally[k]}")
    return 1 if tally["disagree"] else 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(AgreementConfig):
        ap.add_argument("--" + f.name.replace("_", "-"), type=type(f.default), default=f.default)
    raise SystemExit(run(AgreementConfig(**vars(ap.parse_args()))))


if __name__ == "__main__":
    main()
