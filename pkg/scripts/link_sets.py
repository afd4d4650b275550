"""Triangulations of S1, S2, S3 admitting no apex-reducing flip, under both
readings of the flip quantifier (in the contracted configuration, or in the
native cube).

    python3 scripts/link_sets.py
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass, field

from cubeflip.cli import name_link
from cubeflip.contraction import s_context
from cubeflip.enumeration import reduction_free_links, flip_graph_triangulations


@dataclass
class LinkSetStudy:
    quantifiers: tuple[str, ...] = ("contracted", "native")
    configs: tuple[int, ...] = field(default=(1, 2, 3))


def run(cfg: LinkSetStudy) -> dict:
    out = {}
    for q in cfg.configs:
        ctx = s_context(q)
        trias = flip_graph_triangulations(ctx.target)
        row = {"triangulations": len(trias)}
        for quant in cfg.quantifiers:
            row[quant] = sorted(name_link(T, ctx) for T in reduction_free_links("a", ctx, trias, quant))
        out[f"S{q}"] = row
    return out


def main() -> None:
    argparse.ArgumentParser(description=__doc__.splitlines()[0]).parse_args()
    print(json.dumps(run(LinkSetStudy()), indent=2))


if __name__ == "__main__":
    main()
