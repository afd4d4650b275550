"""Symmetry-reduced breadth-first enumeration of the 4-cube flip-graph.

Resumable: rerunning with the same checkpoint continues where it stopped.

    python3 scripts/run_cube4_enumeration.py --checkpoint runs/cube4.cp
"""

from __future__ import annotations

import argparse
import json
import logging
import time
from dataclasses import asdict, dataclass

from cubeflip.enumeration import explore_flip_graph
from cubeflip.formats import load_config

log = logging.getLogger("enumerate")


@dataclass
class EnumerationRun:
    config: str = "cube4"
    checkpoint: str = "cube4.cp"
    checkpoint_every: float = 120.0
    max_levels: int | None = None
    engine: str = "auto"
    report: str | None = None


def run(cfg: EnumerationRun) -> dict:
    t0 = time.time()

    def progress(level, nodes, total):
        log.info("level %d: %d nodes, total %d, %.0f s", level, nodes, total, time.time() - t0)

    rep = explore_flip_graph(
        load_config(cfg.config),
        mod_symmetry=True,
        checkpoint=cfg.checkpoint,
        checkpoint_every=cfg.checkpoint_every,
        max_levels=cfg.max_levels,
        engine=cfg.engine,
        progress=progress,
    )
    out = {**asdict(cfg), **rep.as_dict(), "seconds": round(time.time() - t0, 1)}
    if cfg.report:
        with open(cfg.report, "w") as fh:
            json.dump(out, fh, indent=2)
    return out


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(EnumerationRun()).items():
        kind = float if name == "checkpoint_every" else int if name == "max_levels" else str
        p.add_argument("--" + name.replace("_", "-"), type=kind, default=default)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    out = run(EnumerationRun(**vars(p.parse_args())))
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
