"""Flippable circuits and bistellar flips."""

from __future__ import annotations

from dataclasses import dataclass

from .complex import Triangulation
from .kernel import Circuit, Face, bits


class NotFlippable(ValueError):
    pass


@dataclass(frozen=True)
class FlipMove:
    """Flip of ``circuit`` removing the triangulation of it that holds
    ``removed``; ``link`` is the common link (maximal faces) of its cells."""

    circuit: Circuit
    removed: Face
    link: tuple[Face, ...]

    @property
    def added(self) -> Face:
        return self.circuit.other_side(self.removed)

    def reversed(self) -> "FlipMove":
        return FlipMove(self.circuit, self.added, self.link)

    def removed_cells(self) -> list[Face]:
        z = self.circuit.support
        return [lam | (z & ~(1 << y)) for y in bits(self.added) for lam in self.link]

    def added_cells(self) -> list[Face]:
        z = self.circuit.support
        return [lam | (z & ~(1 << y)) for y in bits(self.removed) for lam in self.link]


def _link_cells(T: Triangulation, f: Face) -> tuple[Face, ...]:
    return tuple(sorted(c & ~f for c in T.cells if c & f == f))


def is_flippable(T: Triangulation, z: Circuit, removed: Face) -> FlipMove | None:
    """The move flipping ``z`` out of ``T`` if the triangulation of ``z``
    containing ``removed`` sits in ``T`` with a common link."""
    other = z.other_side(removed)
    faces = T.faces
    if removed not in faces:
        return None
    lam = None
    for y in bits(other):
        f = z.support & ~(1 << y)
        if f not in faces:
            return None
        lk = _link_cells(T, f)
        if lam is None:
            lam = lk
        elif lk != lam:
            return None
    return FlipMove(z, removed, lam)


def flippable_moves(T: Triangulation) -> list[FlipMove]:
    """Every flippable circuit of ``T`` once, in canonical circuit order."""
    faces = T.faces
    out = []
    for z in T.cfg.circuits:
        for side in (z.neg, z.pos):
            if side in faces:
                m = is_flippable(T, z, side)
                if m is not None:
                    out.append(m)
                break
    return out


def apply_flip(T: Triangulation, m: FlipMove) -> Triangulation:
    check = is_flippable(T, m.circuit, m.removed)
    if check is None or check.link != m.link:
        raise NotFlippable(f"{T.cfg.fmt(m.circuit.support)} is not flippable here")
    gone = set(m.removed_cells())
    cells = [c for c in T.cells if c not in gone]
    cells.extend(m.added_cells())
    return Triangulation(T.cfg, tuple(cells))
