"""Exact point configurations, affine rank, volumes and circuits.

Faces are plain ``int`` bitmasks over the label indices of a :class:`Config`
(bit ``i`` set means label ``cfg.labels[i]`` is in the face). All arithmetic
is done with :class:`fractions.Fraction` or Python integers.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Face = int


class KernelError(Exception):
    pass


class UnknownLabel(KernelError, KeyError):
    pass


class WrongCardinality(KernelError, ValueError):
    pass


class NotACircuit(KernelError, ValueError):
    pass


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / Fraction(m[r][c])
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return len(_rref([[Fraction(v) for v in vec] for vec in vectors])[1])


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def nullspace(columns: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of {lam : sum_i lam_i * columns[i] = 0}."""
    k = len(columns)
    if k == 0:
        return []
    dim = len(columns[0])
    rows = [[Fraction(columns[j][i]) for j in range(k)] for i in range(dim)]
    red, pivots = _rref(rows)
    free = [j for j in range(k) if j not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * k
        vec[fcol] = Fraction(1)
        for r, pcol in enumerate(pivots):
            vec[pcol] = -red[r][fcol]
        basis.append(vec)
    return basis


@dataclass(frozen=True, order=True)
class Circuit:
    """A circuit given by its support and its Radon partition (bitmasks).

    ``neg`` is the distinguished side: it holds the apex when the circuit was
    oriented through a label, otherwise it is the lexicographically smaller
    side.
    """

    support: Face
    neg: Face
    pos: Face

    def flipped(self) -> "Circuit":
        return Circuit(self.support, self.pos, self.neg)

    def sides(self) -> tuple[Face, Face]:
        return self.neg, self.pos

    def other_side(self, side: Face) -> Face:
        if side == self.neg:
            return self.pos
        if side == self.pos:
            return self.neg
        raise ValueError("not a side of this circuit")

    def oriented(self, label_index: int) -> "Circuit":
        """Orient so that the side holding ``label_index`` is ``neg``."""
        bit = 1 << label_index
        if not self.support & bit:
            raise ValueError("label not in circuit support")
        return self if self.neg & bit else self.flipped()


def _lex_key(mask: Face) -> tuple[int, ...]:
    return tuple(bits(mask))


def circuit_sort_key(z: Circuit) -> tuple:
    """Canonical circuit order: support size, then support labels."""
    return (popcount(z.support), _lex_key(z.support), _lex_key(z.neg))


@dataclass(frozen=True)
class Config:
    """Labeled point configuration with exact rational coordinates."""

    labels: tuple[str, ...]
    coords: tuple[tuple[Fraction, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.labels) != len(self.coords):
            raise ValueError("labels and coords differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("points must be distinct")
        dims = {len(c) for c in self.coords}
        if len(dims) > 1:
            raise ValueError("points have inconsistent dimensions")

    @classmethod
    def from_points(cls, labels: Iterable[str], points: Iterable[Iterable], name: str = "") -> "Config":
        pts = tuple(tuple(Fraction(v) for v in p) for p in points)
        return cls(tuple(labels), pts, name)

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"Config({self.name or '?'}, n={len(self)}, dim={self.affine_dim})"

    @property
    def ambient_dim(self) -> int:
        return len(self.coords[0]) if self.coords else 0

    @cached_property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @property
    def full(self) -> Face:
        return (1 << len(self.labels)) - 1

    @cached_property
    def affine_dim(self) -> int:
        return affine_rank(self.full, self) - 1

    @cached_property
    def homogeneous(self) -> tuple[tuple[int, ...], ...]:
        """Integer homogenized columns (1, p) scaled by a positive factor."""
        out = []
        for p in self.coords:
            den = math.lcm(*(v.denominator for v in p)) if p else 1
            out.append((den,) + tuple(int(v * den) for v in p))
        return tuple(out)

    @cached_property
    def affine_chart(self) -> tuple[int, ...]:
        """Coordinate positions whose projection keeps the affine dimension.

        Volumes of a lower-dimensional configuration are measured in this
        coordinate projection, a fixed positive multiple of the true volume.
        """
        d = self.affine_dim
        for chart in itertools.combinations(range(self.ambient_dim), d):
            proj = [(1,) + tuple(p[j] for j in chart) for p in self.coords]
            if rank(proj) == d + 1:
                return chart
        raise KernelError("no coordinate chart found")  # pragma: no cover

    @cached_property
    def chart_coords(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(p[j] for j in self.affine_chart) for p in self.coords)

    @cached_property
    def sqdist(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(
            tuple(sum((a - b) ** 2 for a, b in zip(p, q)) for q in self.coords)
            for p in self.coords
        )

    @cached_property
    def identity_hash(self) -> str:
        h = hashlib.sha256()
        for lab, p in zip(self.labels, self.coords):
            h.update(lab.encode())
            h.update(b":" + ",".join(str(v) for v in p).encode() + b";")
        return h.hexdigest()

    # -- label helpers -------------------------------------------------
    def label_index(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def face(self, labels: Iterable[str] | str) -> Face:
        """Bitmask of a label collection.

        A string is split on whitespace; a string without whitespace whose
        characters are all labels is read character by character.
        """
        if isinstance(labels, str):
            if any(ch.isspace() for ch in labels):
                labels = labels.split()
            elif labels in self.index:
                labels = [labels]
            else:
                labels = list(labels)
        mask = 0
        for lab in labels:
            mask |= 1 << self.label_index(lab)
        return mask

    def names(self, mask: Face) -> list[str]:
        return [self.labels[i] for i in bits(mask)]

    def fmt(self, mask: Face, sep: str = " ") -> str:
        return sep.join(self.names(mask))

    def check_face(self, mask: Face) -> None:
        if mask & ~self.full:
            raise UnknownLabel(f"mask {mask:#x} outside configuration")

    # -- cached combinatorics -----------------------------------------
    @cached_property
    def circuits(self) -> tuple[Circuit, ...]:
        return tuple(_scan_circuits(self))

    @cached_property
    def circuits_by_support(self) -> dict[Face, Circuit]:
        return {z.support: z for z in self.circuits}


def affine_rank(labels: Face, cfg: Config) -> int:
    """Number of affinely independent points among ``labels``."""
    cfg.check_face(labels)
    return rank([cfg.homogeneous[i] for i in bits(labels)])


def is_independent(labels: Face, cfg: Config) -> bool:
    return affine_rank(labels, cfg) == popcount(labels)


def signed_volume(simplex: Face | Sequence[str], cfg: Config) -> Fraction:
    """Signed volume of a full-dimensional simplex.

    With a mask the vertices are taken in configuration order; a label
    sequence fixes the evaluation order explicitly.
    """
    if isinstance(simplex, int):
        cfg.check_face(simplex)
        idx = bits(simplex)
    else:
        idx = [cfg.label_index(lab) for lab in simplex]
    d = cfg.affine_dim
    if len(idx) != d + 1 or len(set(idx)) != len(idx):
        raise WrongCardinality(f"need {d + 1} distinct points, got {len(idx)}")
    pts = [cfg.chart_coords[i] for i in idx]
    base = pts[0]
    rows = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    return determinant(rows) / math.factorial(d)


def _kernel_circuit(idx: list[int], cfg: Config) -> Circuit | None:
    cols = [cfg.homogeneous[i] for i in idx]
    ker = nullspace(cols)
    if len(ker) != 1 or any(v == 0 for v in ker[0]):
        return None
    neg = pos = 0
    for i, v in zip(idx, ker[0]):
        if v < 0:
            neg |= 1 << i
        else:
            pos |= 1 << i
    if _lex_key(pos) < _lex_key(neg):
        neg, pos = pos, neg
    return Circuit(neg | pos, neg, pos)


def radon_partition(support: Face, cfg: Config) -> Circuit:
    """Radon partition of a circuit (unique kernel vector signs the sides)."""
    cfg.check_face(support)
    z = _kernel_circuit(bits(support), cfg)
    if z is None:
        raise NotACircuit(cfg.fmt(support))
    return z


def _float_kernel_circuit(idx: list[int], cfg: Config, H: np.ndarray) -> Circuit | None | bool:
    """Fast path: kernel from an SVD, rationalized and checked exactly.

    Returns False when the floating point result is inconclusive.
    """
    sv = np.linalg.svd(H[idx].T, compute_uv=False, full_matrices=False)
    k = len(idx)
    nonzero = int((sv > 1e-6).sum())
    small = int((sv < 1e-9).sum())
    if nonzero + small != len(sv):
        return False
    if nonzero == k:
        return None  # independent
    if nonzero != k - 1:
        return None  # kernel of dimension two or more
    vec = np.linalg.svd(H[idx].T)[2][-1]
    vec = vec / np.abs(vec).max()
    if (np.abs(vec) < 1e-6).any():
        return None  # some point outside the dependency
    lam = [Fraction(float(v)).limit_denominator(10**6) for v in vec]
    cols = [cfg.homogeneous[i] for i in idx]
    if any(sum(l * c[j] for l, c in zip(lam, cols)) != 0 for j in range(len(cols[0]))):
        return False
    neg = pos = 0
    for i, v in zip(idx, lam):
        if v < 0:
            neg |= 1 << i
        else:
            pos |= 1 << i
    if _lex_key(pos) < _lex_key(neg):
        neg, pos = pos, neg
    return Circuit(neg | pos, neg, pos)


def _scan_circuits(cfg: Config) -> list[Circuit]:
    out = []
    n = len(cfg)
    H = np.array([[float(v) for v in h] for h in cfg.homogeneous])
    for k in range(2, min(n, cfg.affine_dim + 2) + 1):
        for idx in itertools.combinations(range(n), k):
            z = _float_kernel_circuit(list(idx), cfg, H)
            if z is False:
                z = _kernel_circuit(list(idx), cfg)
            if z is not None:
                out.append(z)
    out.sort(key=circuit_sort_key)
    return out


def enumerate_circuits(cfg: Config) -> list[Circuit]:
    """All circuits of ``cfg`` in canonical order."""
    return list(cfg.circuits)


def circuits_through(cfg: Config, x: str) -> list[Circuit]:
    """Circuits whose support contains ``x``, oriented with ``x`` on ``neg``."""
    i = cfg.label_index(x)
    bit = 1 << i
    return [z.oriented(i) for z in cfg.circuits if z.support & bit]


# -- presets -------------------------------------------------------------

CUBE_LABELS = "abcdefghijklmnop"


def cube_config(dim: int = 4) -> Config:
    """Vertices of [0,1]^dim; label k has binary coordinates of k (u1 = bit 0)."""
    pts = [tuple((k >> j) & 1 for j in range(dim)) for k in range(2**dim)]
    return Config.from_points(CUBE_LABELS[: 2**dim], pts, name=f"cube{dim}")


CUBE4 = cube_config(4)
CUBE3 = cube_config(3)
