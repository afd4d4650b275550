"""Estimate the share of non-regular triangulations met along random flip
walks of the 4-cube, and save the first one found.

    python3 scripts/scan_nonregular.py --samples 200 --save nonregular.tri
"""

from __future__ import annotations

import argparse
import json
import random
from dataclasses import asdict, dataclass

from cubeflip.complex import corner_cut_triangulations
from cubeflip.flips import apply_flip, flippable_moves
from cubeflip.formats import format_triangulation
from cubeflip.regularity import is_regular, verify_certificate


@dataclass
class ScanConfig:
    samples: int = 100
    stride: int = 20
    seed: int = 0
    save: str | None = None


def run(cfg: ScanConfig) -> dict:
    rng = random.Random(cfg.seed)
    T = sorted(corner_cut_triangulations(), key=lambda t: t.cells)[0]
    nonregular, first = 0, None
    for i in range(cfg.samples):
        for _ in range(cfg.stride):
            T = apply_flip(T, rng.choice(flippable_moves(T)))
        w = is_regular(T)
        if w is None:
            nonregular += 1
            if first is None:
                first = (i + 1) * cfg.stride
                if cfg.save:
                    with open(cfg.save, "w") as fh:
                        fh.write(format_triangulation(T))
        else:
            assert verify_certificate(T, w)
    return {**asdict(cfg), "nonregular": nonregular, "share": nonregular / cfg.samples,
            "first_at_step": first}


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(ScanConfig()).items():
        p.add_argument("--" + name, type=str if name == "save" else int, default=default)
    print(json.dumps(run(ScanConfig(**vars(p.parse_args()))), indent=2))


if __name__ == "__main__":
    main()
