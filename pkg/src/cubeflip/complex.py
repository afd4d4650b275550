"""Triangulations stored by their maximal faces, plus the cube-specific
constructions: corner simplices, sigma graphs and corner-cut triangulations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable

import numpy as np

from .kernel import (
    CUBE4,
    Config,
    Face,
    bits,
    determinant,
    is_independent,
    popcount,
    signed_volume,
)


class ComplexError(Exception):
    pass


class NotAFace(ComplexError, ValueError):
    pass


class BadDiagonal(ComplexError, ValueError):
    pass


class DegenerateConfig(ComplexError, ValueError):
    pass


class ValidationError(ComplexError):
    """Raised by :func:`validate`; ``kind`` is one of
    ``cell``, ``intersection`` or ``volume``."""

    def __init__(self, kind: str, message: str, detail=None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.detail = detail


def subsets(mask: Face) -> Iterable[Face]:
    """All submasks of ``mask`` including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class Triangulation:
    cfg: Config
    cells: tuple[Face, ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(sorted(set(self.cells))))

    @classmethod
    def from_labels(cls, cfg: Config, cells: Iterable) -> "Triangulation":
        return cls(cfg, tuple(cfg.face(c) for c in cells))

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __repr__(self) -> str:
        body = ", ".join(self.cfg.fmt(c, "") for c in self.cells)
        return f"Triangulation({self.cfg.name}: {body})"

    @cached_property
    def faces(self) -> frozenset[Face]:
        out = set()
        for c in self.cells:
            out.update(subsets(c))
        return frozenset(out)

    @cached_property
    def vertices(self) -> Face:
        v = 0
        for c in self.cells:
            v |= c
        return v

    @cached_property
    def edges(self) -> frozenset[Face]:
        return frozenset(f for f in self.faces if popcount(f) == 2)

    def relabel(self, perm: tuple[int, ...]) -> "Triangulation":
        """Image under the index permutation ``perm`` (i -> perm[i])."""
        return Triangulation(self.cfg, tuple(map_mask(c, perm) for c in self.cells))

    def to_labels(self) -> list[list[str]]:
        return [self.cfg.names(c) for c in self.cells]


def map_mask(mask: Face, perm) -> Face:
    out = 0
    for i in bits(mask):
        out |= 1 << perm[i]
    return out


def has_face(T: Triangulation, f: Face) -> bool:
    T.cfg.check_face(f)
    return f in T.faces


def _require_face(T: Triangulation, t: Face) -> None:
    if t not in T.faces:
        raise NotAFace(T.cfg.fmt(t))


def link(T: Triangulation, t: Face) -> frozenset[Face]:
    """Maximal faces of the link of ``t`` in ``T``."""
    _require_face(T, t)
    return frozenset(c & ~t for c in T.cells if c & t == t)


def star(T: Triangulation, t: Face) -> frozenset[Face]:
    """Maximal faces of the star of ``t``: the cells containing it."""
    _require_face(T, t)
    return frozenset(c for c in T.cells if c & t == t)


# -- the 4-cube ------------------------------------------------------------


class CubeClass(enum.Enum):
    E = "E"
    O = "O"

    @property
    def labels(self) -> str:
        return "adfgjkmp" if self is CubeClass.E else "bcehilno"

    def mask(self, cfg: Config = CUBE4) -> Face:
        return cfg.face(self.labels)

    @property
    def other(self) -> "CubeClass":
        return CubeClass.O if self is CubeClass.E else CubeClass.E

    @classmethod
    def of(cls, label: str) -> "CubeClass":
        return cls.E if label in cls.E.labels else cls.O


def sigma_graph(T: Triangulation, q: int) -> frozenset[Face]:
    """Edges of the 1-skeleton of ``T`` with squared length ``q``."""
    d = T.cfg.sqdist
    out = []
    for e in T.edges:
        i, j = bits(e)
        if d[i][j] == q:
            out.append(e)
    return frozenset(out)


def sigma_degree(T: Triangulation, q: int, x: int) -> int:
    bit = 1 << x
    return sum(1 for e in sigma_graph(T, q) if e & bit)


def corner_simplex(x: str, cfg: Config = CUBE4) -> Face:
    """``x`` together with its unit-distance neighbours."""
    i = cfg.label_index(x)
    mask = 1 << i
    for j, dist in enumerate(cfg.sqdist[i]):
        if dist == 1:
            mask |= 1 << j
    return mask


def class_diagonals(s: CubeClass, cfg: Config = CUBE4) -> list[Face]:
    idx = bits(s.mask(cfg))
    return sorted(
        (1 << i) | (1 << j) for i in idx for j in idx if i < j and cfg.sqdist[i][j] == 4
    )


def make_corner_cut(s: CubeClass | str, diagonal: Face | str) -> Triangulation:
    s = CubeClass(s) if isinstance(s, str) else s
    cfg = CUBE4
    if isinstance(diagonal, str):
        diagonal = cfg.face(diagonal)
    diags = class_diagonals(s)
    if diagonal not in diags:
        raise BadDiagonal(f"{cfg.fmt(diagonal)} is not a diagonal of class {s.value}")
    cells = [corner_simplex(y) for y in s.other.labels]
    others = [bits(d) for d in diags if d != diagonal]
    for u in others[0]:
        for v in others[1]:
            for w in others[2]:
                cells.append(diagonal | (1 << u) | (1 << v) | (1 << w))
    return Triangulation(cfg, tuple(cells))


@lru_cache(maxsize=None)
def corner_cut_triangulations() -> dict[Triangulation, tuple[CubeClass, Face]]:
    out = {}
    for s in CubeClass:
        for d in class_diagonals(s):
            out[make_corner_cut(s, d)] = (s, d)
    return out


def is_corner_cut(T: Triangulation) -> tuple[CubeClass, Face] | None:
    if T.cfg != CUBE4:
        return None
    return corner_cut_triangulations().get(T)


def corner_count(T: Triangulation, s: CubeClass) -> int:
    cells = set(T.cells)
    return sum(1 for x in s.labels if corner_simplex(x) in cells)


# -- validation ----------------------------------------------------------


@lru_cache(maxsize=64)
def _circuit_arrays(cfg: Config) -> tuple[np.ndarray, np.ndarray]:
    neg = np.array([z.neg for z in cfg.circuits], dtype=np.int64)
    pos = np.array([z.pos for z in cfg.circuits], dtype=np.int64)
    return neg, pos


def _face_table(T: Triangulation) -> np.ndarray:
    table = np.zeros(1 << len(T.cfg), dtype=bool)
    table[np.fromiter(T.faces, dtype=np.int64)] = True
    return table


def crossing_circuit(T: Triangulation):
    """First circuit whose two sides are both faces of ``T``, or None."""
    neg, pos = _circuit_arrays(T.cfg)
    if len(neg) == 0:
        return None
    if len(T.cfg) <= 22:
        table = _face_table(T)
        hit = np.flatnonzero(table[neg] & table[pos])
        return T.cfg.circuits[hit[0]] if len(hit) else None
    faces = T.faces
    for z in T.cfg.circuits:
        if z.neg in faces and z.pos in faces:
            return z
    return None


def validate(T: Triangulation) -> None:
    """Raise :class:`ValidationError` unless ``T`` triangulates its configuration."""
    cfg = T.cfg
    d = cfg.affine_dim
    total = Fraction(0)
    for c in T.cells:
        cfg.check_face(c)
        if popcount(c) != d + 1 or not is_independent(c, cfg):
            raise ValidationError("cell", f"{cfg.fmt(c)} is not a full-dimensional simplex", c)
        total += abs(signed_volume(c, cfg))
    z = crossing_circuit(T)
    if z is not None:
        raise ValidationError(
            "intersection",
            f"circuit {cfg.fmt(z.support)} has both sides {cfg.fmt(z.neg)} / {cfg.fmt(z.pos)} in T",
            z,
        )
    hull = hull_volume(cfg)
    if total != hull:
        raise ValidationError("volume", f"cells cover {total}, hull is {hull}", hull - total)


def is_valid(T: Triangulation) -> bool:
    try:
        validate(T)
    except ValidationError:
        return False
    return True


# -- placing triangulation -------------------------------------------------


def _orientation(cfg: Config, idx: list[int], p: int) -> int:
    pts = [cfg.chart_coords[i] for i in idx] + [cfg.chart_coords[p]]
    base = pts[0]
    det = determinant([[a - b for a, b in zip(q, base)] for q in pts[1:]])
    return (det > 0) - (det < 0)


def placing_triangulation(cfg: Config) -> Triangulation:
    """Placing triangulation in label order.

    The first affine basis met in label order forms the initial simplex; every
    later point outside the current hull is coned over the boundary facets it
    sees strictly. Points inside the current hull are left unused.
    """
    d = cfg.affine_dim
    n = len(cfg)
    if d < 1:
        raise DegenerateConfig("configuration has affine dimension < 1")
    basis = 0
    for i in range(n):
        if is_independent(basis | (1 << i), cfg):
            basis |= 1 << i
        if popcount(basis) == d + 1:
            break
    cells = [basis]
    for p in range(n):
        if basis >> p & 1:
            continue
        # boundary facets: (facet, opposite vertex) appearing in one cell only
        count: dict[Face, list[int]] = {}
        for c in cells:
            for v in bits(c):
                count.setdefault(c & ~(1 << v), []).append(v)
        new = []
        for facet, opp in count.items():
            if len(opp) != 1:
                continue
            idx = bits(facet)
            sp = _orientation(cfg, idx, p)
            sv = _orientation(cfg, idx, opp[0])
            if sp * sv < 0:
                new.append(facet | (1 << p))
        cells.extend(new)
    return Triangulation(cfg, tuple(cells))


@lru_cache(maxsize=None)
def hull_volume(cfg: Config) -> Fraction:
    """Volume of conv(cfg), measured through its placing triangulation."""
    T = placing_triangulation(cfg)
    return sum((abs(signed_volume(c, cfg)) for c in T.cells), Fraction(0))
