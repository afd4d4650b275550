"""Constructive flip paths from any triangulation of the 4-cube to a
corner-cut triangulation."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .complex import (
    CubeClass,
    Triangulation,
    corner_simplex,
    is_corner_cut,
    map_mask,
    sigma_graph,
    validate,
)
from .contraction import contract_config, link_context, s_context, star_volume_D, vertex_set_V
from .flips import FlipMove, apply_flip, flippable_moves, is_flippable
from .kernel import CUBE4, Face, bits, radon_partition
from .symmetry import cube_stabilizer_maps, inverse, isometric_subset_embedding


class DriverError(RuntimeError):
    pass


class ParadoxError(DriverError):
    """A step the connectivity argument guarantees did not happen."""


class NotU1(DriverError, ValueError):
    pass


class PreconditionFailed(DriverError, ValueError):
    pass


# The two exceptional links at ``a``, as tetrahedra of contracted labels.
U1_MINUS = ("bcfl", "bflm", "bilm", "cfgl", "cgil", "efgl", "eflm", "eglm", "gilm")
U1_PLUS = ("bcgl", "bfgl", "bfil", "cglm", "cilm", "efgl", "eflm", "eglm", "film")


def _star_cells(tets, apex: str = "a") -> frozenset[Face]:
    return frozenset(CUBE4.face(apex + t) for t in tets)


@dataclass
class FlipPath:
    start: Triangulation
    moves: list[FlipMove] = field(default_factory=list)
    end: Triangulation | None = None

    def __post_init__(self):
        if self.end is None:
            self.end = self.start

    @classmethod
    def from_moves(cls, start: Triangulation, moves) -> "FlipPath":
        path = cls(start)
        for m in moves:
            path.push(m)
        return path

    def __len__(self) -> int:
        return len(self.moves)

    def push(self, move: FlipMove) -> Triangulation:
        self.end = apply_flip(self.end, move)
        self.moves.append(move)
        return self.end

    def extend(self, other: "FlipPath") -> None:
        if other.start != self.end:
            raise ValueError("paths do not connect")
        self.moves.extend(other.moves)
        self.end = other.end

    def replay(self, check: bool = True) -> Triangulation:
        """Re-apply every move from ``start``; with ``check`` every
        intermediate triangulation is validated."""
        T = self.start
        if check:
            validate(T)
        for m in self.moves:
            T = apply_flip(T, m)
            if check:
                validate(T)
        if T != self.end:
            raise ValueError("replay does not reproduce the end triangulation")
        return T


# -- greedy corner reduction --------------------------------------------------


def _first_reducing_circuit(T: Triangulation, x: str):
    ctx, L = link_context(T, x)
    for z, zc in ctx.circuits:
        if is_flippable(L, zc, zc.neg) is not None:
            return z
    return None


def greedy_corner_reduce(T: Triangulation, x: str) -> FlipPath:
    """Flip circuits through ``x`` out of its star until the contracted link
    admits no further reducing flip."""
    path = FlipPath(T)
    D = star_volume_D(T, x)
    V = vertex_set_V(T, x)
    while True:
        z = _first_reducing_circuit(path.end, x)
        if z is None:
            return path
        move = is_flippable(path.end, z, z.neg)
        if move is None:
            raise ParadoxError(f"{CUBE4.fmt(z.support)}: flippable in the link of {x} but not in T")
        path.push(move)
        D2 = star_volume_D(path.end, x)
        V2 = vertex_set_V(path.end, x)
        if not D2 < D:
            raise ParadoxError(f"star volume of {x} did not decrease ({D} -> {D2})")
        if V2 & ~V:
            raise ParadoxError(f"vertex set of the star of {x} grew")
        D, V = D2, V2


# -- the U1 escape ----------------------------------------------------------------


def _star_of(T: Triangulation, xi: int) -> frozenset[Face]:
    return frozenset(c for c in T.cells if c >> xi & 1)


def u1_frame(T: Triangulation, x: str):
    """Smallest cube symmetry ``g`` with ``g(x) = a`` mapping the star of
    ``x`` onto the U1- star at ``a``, or None."""
    xi = CUBE4.label_index(x)
    star_x = _star_of(T, xi)
    target = _star_cells(U1_MINUS)
    if len(star_x) != len(target):
        return None
    for g in cube_stabilizer_maps(x, "a"):
        if frozenset(map_mask(c, g) for c in star_x) == target:
            return g
    return None


def link_shape(T: Triangulation, x: str) -> str | None:
    """'U0', 'U1' or None according to the star of ``x``."""
    if corner_simplex(x) in T.cells:
        return "U0"
    if u1_frame(T, x) is not None:
        return "U1"
    return None


def _lift(g_inv, labels: str) -> Face:
    return map_mask(CUBE4.face(labels), g_inv)


def escape_U1(T: Triangulation, x: str) -> FlipPath:
    """Remove the image of ``f`` from the star of ``x`` when its link is a U1."""
    g = u1_frame(T, x)
    if g is None:
        raise NotU1(f"link of {x} is not isometric to U1-/U1+")
    gi = inverse(g)
    xi = CUBE4.label_index(x)
    fi = gi[CUBE4.label_index("f")]
    d_lab = CUBE4.labels[gi[CUBE4.label_index("d")]]
    V0 = vertex_set_V(T, x)

    path = greedy_corner_reduce(T, d_lab)
    if corner_simplex(d_lab) not in path.end.cells:
        raise ParadoxError(f"greedy reduction at {d_lab} did not reach its corner simplex")
    if _star_of(path.end, xi) != _star_of(T, xi):
        raise ParadoxError(f"reduction at {d_lab} disturbed the star of {x}")

    el = _lift(gi, "el")
    sigma4 = sigma_graph(path.end, 4)
    if el not in sigma4 or len(sigma4) != 1:
        raise ParadoxError("expected a single long diagonal edge before the escape flips")
    mid_faces = path.end.faces

    for sup, rem in (("bcfg", "cf"), ("abef", "af")):
        s = _lift(gi, sup)
        z = radon_partition(s, CUBE4)
        removed = _lift(gi, rem)
        if removed not in (z.neg, z.pos):
            raise ParadoxError(f"{CUBE4.fmt(removed)} is not a side of {CUBE4.fmt(s)}")
        move = is_flippable(path.end, z, removed)
        if move is None:
            raise ParadoxError(f"{CUBE4.fmt(s)} is not flippable during the escape")
        path.push(move)

    V1 = vertex_set_V(path.end, x)
    if V1 != V0 & ~(1 << fi):
        raise ParadoxError(f"escape did not remove exactly {CUBE4.labels[fi]} from the star of {x}")
    di = gi[CUBE4.label_index("d")]
    end_faces = path.end.faces
    # the two escape flips keep every face missing x and f; the reduction
    # at d before them only touches faces through d
    for c in mid_faces:
        if not c & ((1 << xi) | (1 << fi)) and c not in end_faces:  # pragma: no cover
            raise ParadoxError("an escape flip removed a face avoiding its circuit vertices")
    for c in T.faces:
        if not c & ((1 << xi) | (1 << fi) | (1 << di)) and c not in end_faces:  # pragma: no cover
            raise ParadoxError("a face avoiding the escape vertices was lost")
    return path


# -- corner insertion ---------------------------------------------------------


def s_embedding(T: Triangulation, x: str):
    """(q, map) for the first q such that V_x(T)/x embeds isometrically in S_q."""
    V = vertex_set_V(T, x)
    try:
        ctx = contract_config(x, V)
    except ValueError:
        return None
    for q in (1, 2, 3):
        S = s_context(q).target
        emb = isometric_subset_embedding(ctx.target.full, ctx.target, S.full, S)
        if emb is not None:
            return q, emb
    return None


def _corners(T: Triangulation, s: CubeClass) -> frozenset[str]:
    cells = set(T.cells)
    return frozenset(y for y in s.labels if corner_simplex(y) in cells)


def insert_corner(T: Triangulation, x: str) -> FlipPath:
    """Flip until the corner simplex at ``x`` is a cell."""
    if corner_simplex(x) in T.cells:
        return FlipPath(T)
    if s_embedding(T, x) is None:
        raise PreconditionFailed(f"V_{x}(T)/{x} does not embed in S1, S2 or S3")
    s = CubeClass.of(x)
    before = _corners(T, s)
    path = greedy_corner_reduce(T, x)
    if corner_simplex(x) not in path.end.cells:
        if u1_frame(path.end, x) is None:
            raise ParadoxError(f"greedy reduction at {x} ended outside U0, U1-, U1+")
        path.extend(escape_U1(path.end, x))
        path.extend(greedy_corner_reduce(path.end, x))
        if corner_simplex(x) not in path.end.cells:
            raise ParadoxError(f"second greedy pass at {x} did not reach U0")
    end = path.end
    xi = CUBE4.label_index(x)
    for q in (2, 3, 4):
        if any(e >> xi & 1 for e in sigma_graph(end, q)):
            raise ParadoxError(f"{x} is not isolated in sigma_{q} although its corner is present")
    if not before <= _corners(end, s):
        raise ParadoxError("a corner simplex of the same class was removed")
    smask = s.mask()
    faces = end.faces
    for f in T.faces:
        if f & smask == 0 and f not in faces:
            raise ParadoxError("a face disjoint from the parity class was removed")
    return path


# -- orchestration ------------------------------------------------------------


def working_class(T: Triangulation) -> CubeClass:
    edges = sigma_graph(T, 4)
    if edges:
        e = min(edges)
        return CubeClass.of(CUBE4.labels[bits(e)[0]]).other
    return CubeClass.E


def flip_to_corner_cut(T: Triangulation) -> FlipPath:
    """A flip path from ``T`` to a corner-cut triangulation."""
    validate(T)
    path = FlipPath(T)
    s = working_class(T)
    switched = False
    while is_corner_cut(path.end) is None:
        cur = path.end
        smask = s.mask()
        if any(e & smask == e for e in sigma_graph(cur, 4)):
            # a long diagonal inside the working class: its complement is free
            if switched:
                raise ParadoxError("long diagonals inside both parity classes")
            s, switched = s.other, True
            continue
        choice = None
        for x in s.labels:
            if corner_simplex(x) in cur.cells:
                continue
            if s_embedding(cur, x) is not None:
                choice = x
                break
        if choice is None:
            raise ParadoxError(f"no vertex of class {s.name} admits an S_q embedding")
        n_before = len(_corners(cur, s))
        path.extend(insert_corner(cur, choice))
        if len(_corners(path.end, s)) <= n_before:
            raise ParadoxError("corner count of the working class did not increase")
    return path


# -- random walks ----------------------------------------------------------------


def random_walk(T: Triangulation, steps: int, rng: random.Random) -> FlipPath:
    """``steps`` uniformly random flips starting at ``T``."""
    path = FlipPath(T)
    for _ in range(steps):
        moves = flippable_moves(path.end)
        if not moves:
            break
        path.push(rng.choice(moves))
    return path
