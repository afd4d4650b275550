"""Random flip walks off corner-cut triangulations, each connected back to a
corner cut; reports path length statistics.

    python3 scripts/connect_walks.py --walks 200 --steps 200
"""

from __future__ import annotations

import argparse
import json
import random
import statistics
import time
from dataclasses import asdict, dataclass

from cubeflip.complex import corner_cut_triangulations, is_corner_cut
from cubeflip.driver import flip_to_corner_cut, random_walk


@dataclass
class WalkExperiment:
    walks: int = 100
    steps: int = 200
    seed: int = 0
    replay: bool = True


def run(cfg: WalkExperiment) -> dict:
    rng = random.Random(cfg.seed)
    starts = sorted(corner_cut_triangulations(), key=lambda t: t.cells)
    lengths, seconds = [], []
    for _ in range(cfg.walks):
        T = random_walk(rng.choice(starts), cfg.steps, rng).end
        t0 = time.time()
        path = flip_to_corner_cut(T)
        seconds.append(time.time() - t0)
        if cfg.replay:
            path.replay(check=True)
        assert is_corner_cut(path.end) is not None
        lengths.append(len(path))
    return {
        **asdict(cfg),
        "connected": len(lengths),
        "length_mean": statistics.mean(lengths),
        "length_max": max(lengths),
        "length_hist": {k: lengths.count(k) for k in sorted(set(lengths))},
        "seconds_per_path": statistics.mean(seconds),
    }


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--walks", type=int, default=WalkExperiment.walks)
    p.add_argument("--steps", type=int, default=WalkExperiment.steps)
    p.add_argument("--seed", type=int, default=WalkExperiment.seed)
    p.add_argument("--no-replay", dest="replay", action="store_false")
    print(json.dumps(run(WalkExperiment(**vars(p.parse_args()))), indent=2))


if __name__ == "__main__":
    main()
