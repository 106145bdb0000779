"""Arena size and build/solve time as the buffer bound grows.

    python scripts/scale_benchmark.py --max-bound 3
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, fields

from tsogames.arena import GameSpec, UpdatePolicy, build_arena
from tsogames.corpus import dense_program
from tsogames.game import solve


@dataclass
class ScaleConfig:
    n_procs: int = 2
    n_states: int = 4
    n_vars: int = 2
    max_bound: int = 3
    policy_a: str = "always"
    policy_b: str = "always"


def run(cfg: ScaleConfig) -> None:
    p = dense_program(cfg.n_procs, cfg.n_states, cfg.n_vars)
    pa, pb = UpdatePolicy.parse(cfg.policy_a), UpdatePolicy.parse(cfg.policy_b)
    print(f"{'bound':>5} {'nodes':>9} {'edges':>10} {'build s':>8} {'solve s':>8} winner")
    for k in range(cfg.max_bound + 1):
        t0 = time.perf_counter()
        arena = build_arena(GameSpec(p, pa, pb, buffer_bound=k))
        t1 = time.perf_counter()
        r = solve(arena.game)
        t2 = time.perf_counter()
        g = arena.game
        print(f"{k:>5} {len(g.owner):>9} {g.num_edges:>10} {t1 - t0:>8.2f} {t2 - t1:>8.2f} {r.winner(arena.initial)}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(ScaleConfig):
        ap.add_argument("--" + f.name.replace("_", "-"), type=type(f.default), default=f.default)
    run(ScaleConfig(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
