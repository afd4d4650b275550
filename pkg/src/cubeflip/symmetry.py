"""Isometry groups of configurations and canonical forms of triangulations.

A symmetry is stored as a tuple ``perm`` of label indices: label ``i`` is
sent to ``perm[i]``.
"""

from __future__ import annotations

import hashlib
import itertools
from functools import lru_cache
from typing import Sequence

from .complex import Triangulation, map_mask
from .kernel import CUBE4, Config, Face, bits

SymMap = tuple[int, ...]


def compose(g: SymMap, h: SymMap) -> SymMap:
    """``g after h``."""
    return tuple(g[i] for i in h)


def inverse(g: SymMap) -> SymMap:
    out = [0] * len(g)
    for i, j in enumerate(g):
        out[j] = i
    return tuple(out)


@lru_cache(maxsize=None)
def cube_group(dim: int = 4) -> tuple[SymMap, ...]:
    """Coordinate permutations composed with reflections, on cube labels."""
    n = 1 << dim
    out = []
    for perm in itertools.permutations(range(dim)):
        for flip in range(n):
            g = []
            for k in range(n):
                img = 0
                for j in range(dim):
                    if (k >> j) & 1:
                        img |= 1 << perm[j]
                g.append(img ^ flip)
            out.append(tuple(g))
    return tuple(sorted(out))


def _backtrack_isometries(
    da: Sequence[Sequence], db: Sequence[Sequence], targets: Sequence[int], injective_only: bool, first: bool
) -> list[tuple[int, ...]]:
    """Distance-preserving injections from points of ``da`` into ``targets``."""
    na = len(da)
    # most constrained first: points with the rarest distance profile
    order = sorted(range(na), key=lambda i: sorted(da[i]))
    profiles_b = {t: sorted(db[t][u] for u in targets) for t in targets}
    results = []
    assign: dict[int, int] = {}
    used = set()

    def compatible(i: int, t: int) -> bool:
        for j, u in assign.items():
            if da[i][j] != db[t][u]:
                return False
        return True

    def rec(k: int) -> bool:
        if k == na:
            results.append(tuple(assign[i] for i in range(na)))
            return first
        i = order[k]
        for t in targets:
            if t in used or not compatible(i, t):
                continue
            if not injective_only and sorted(da[i]) != profiles_b[t]:
                continue
            assign[i] = t
            used.add(t)
            if rec(k + 1):
                return True
            del assign[i]
            used.discard(t)
        return False

    rec(0)
    return results


@lru_cache(maxsize=64)
def automorphisms(cfg: Config) -> tuple[SymMap, ...]:
    """All label bijections of ``cfg`` preserving squared distances."""
    d = cfg.sqdist
    maps = _backtrack_isometries(d, d, list(range(len(cfg))), False, False)
    return tuple(sorted(maps))


def apply(g: SymMap, T: Triangulation) -> Triangulation:
    return T.relabel(g)


def _encode(cells: Sequence[Face], width: int) -> bytes:
    return b"".join(c.to_bytes(width, "big") for c in cells)


def face_width(cfg: Config) -> int:
    return max(1, (len(cfg) + 7) // 8)


def canonical_form(T: Triangulation, G: Sequence[SymMap] | None = None) -> bytes:
    """Group-minimal encoding: relabeled cells, sorted, big-endian, concatenated."""
    width = face_width(T.cfg)
    if not G:
        return _encode(T.cells, width)
    best = None
    for g in G:
        enc = _encode(sorted(map_mask(c, g) for c in T.cells), width)
        if best is None or enc < best:
            best = enc
    return best


def decode_form(form: bytes, cfg: Config) -> Triangulation:
    width = face_width(cfg)
    cells = [int.from_bytes(form[i : i + width], "big") for i in range(0, len(form), width)]
    return Triangulation(cfg, tuple(cells))


def stabilizer_size(T: Triangulation, G: Sequence[SymMap]) -> int:
    cells = set(T.cells)
    return sum(1 for g in G if all(map_mask(c, g) in cells for c in T.cells))


def orbit_size(T: Triangulation, G: Sequence[SymMap]) -> int:
    return len(G) // stabilizer_size(T, G)


def group_hash(G: Sequence[SymMap]) -> str:
    h = hashlib.sha256()
    for g in G:
        h.update(bytes(g) if max(g, default=0) < 256 else repr(g).encode())
    return h.hexdigest()


def isometric_subset_embedding(
    V: Face, cfg_a: Config, S: Face, cfg_b: Config
) -> dict[str, str] | None:
    """A squared-distance preserving injection of V into S, or None."""
    ia = bits(V)
    ib = bits(S)
    if len(ia) > len(ib):
        return None
    da = [[cfg_a.sqdist[i][j] for j in ia] for i in ia]
    db_full = cfg_b.sqdist
    db = {t: {u: db_full[t][u] for u in ib} for t in ib}
    found = _backtrack_isometries(da, db, ib, True, True)
    if not found:
        return None
    return {cfg_a.labels[ia[k]]: cfg_b.labels[t] for k, t in enumerate(found[0])}


def cube_stabilizer_maps(x: str, y: str = "a") -> list[SymMap]:
    """Cube symmetries sending vertex ``x`` to ``y``."""
    xi, yi = CUBE4.label_index(x), CUBE4.label_index(y)
    return [g for g in cube_group() if g[xi] == yi]
