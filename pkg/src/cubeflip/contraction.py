"""Homogeneous contraction of the 4-cube at a vertex.

A vertex ``y != x`` is sent to ``x + 4 / ((y - x).(p - 2x)) * (y - x)`` where
``p`` is the all-ones vertex; every contracted point lies on the hyperplane
``(v - x).(p - 2x) = 4``. Contracted labels are written ``"y/x"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable

from .complex import Triangulation, corner_simplex
from .kernel import CUBE4, Circuit, Config, Face, bits, circuits_through, signed_volume


class ContractionError(ValueError):
    pass


class SameLabel(ContractionError):
    pass


class MissingCornerBase(ContractionError):
    pass


class OutOfScope(ContractionError):
    pass


class NotAVertex(ContractionError):
    pass


def contract_point(x: str, y: str, cfg: Config = CUBE4) -> tuple[Fraction, ...]:
    if x == y:
        raise SameLabel(x)
    px = cfg.coords[cfg.label_index(x)]
    py = cfg.coords[cfg.label_index(y)]
    normal = [1 - 2 * v for v in px]
    diff = [b - a for a, b in zip(px, py)]
    scale = Fraction(4) / sum(d * n for d, n in zip(diff, normal))
    return tuple(a + scale * d for a, d in zip(px, diff))


@dataclass(frozen=True)
class ContractionContext:
    apex: str
    keep: Face  # source mask
    source: Config
    target: Config

    @cached_property
    def forward(self) -> dict[str, str]:
        return {self.source.labels[i]: f"{self.source.labels[i]}/{self.apex}" for i in bits(self.keep)}

    @cached_property
    def inverse(self) -> dict[str, str]:
        return {v: k for k, v in self.forward.items()}

    @cached_property
    def _src_index(self) -> tuple[int, ...]:
        # target index -> source index
        return tuple(bits(self.keep))

    @cached_property
    def _tgt_bit(self) -> dict[int, int]:
        return {s: t for t, s in enumerate(self._src_index)}

    @property
    def apex_index(self) -> int:
        return self.source.label_index(self.apex)

    def to_target(self, mask: Face) -> Face:
        """Contract a source face; the apex is dropped."""
        mask &= ~(1 << self.apex_index)
        if mask & ~self.keep:
            raise OutOfScope(self.source.fmt(mask & ~self.keep))
        out = 0
        for i in bits(mask):
            out |= 1 << self._tgt_bit[i]
        return out

    def to_source(self, mask: Face) -> Face:
        out = 0
        for i in bits(mask):
            out |= 1 << self._src_index[i]
        return out

    def face(self, labels: str | Iterable[str]) -> Face:
        """Target mask from source labels (``"bcfl"`` means {b,c,f,l}/x)."""
        return self.to_target(self.source.face(labels))

    def fmt(self, mask: Face) -> str:
        """Source-style rendering, e.g. ``{b,c,f,l}/a``."""
        return "{" + ",".join(self.source.names(self.to_source(mask))) + "}/" + self.apex

    @cached_property
    def circuits(self) -> tuple[tuple[Circuit, Circuit], ...]:
        """Pairs (z, z/x) for z in Z(apex) supported in ``keep``."""
        out = []
        allowed = self.keep | (1 << self.apex_index)
        for z in circuits_through(self.source, self.apex):
            if z.support & ~allowed:
                continue
            out.append((z, contract_circuit(self, z)))
        return tuple(out)


@lru_cache(maxsize=4096)
def _context(x: str, keep: Face) -> ContractionContext:
    src = CUBE4
    labels = []
    pts = []
    for i in bits(keep):
        y = src.labels[i]
        labels.append(f"{y}/{x}")
        pts.append(contract_point(x, y, src))
    name = f"cube4/{x}[{''.join(src.names(keep))}]"
    tgt = Config(tuple(labels), tuple(pts), name)
    return ContractionContext(x, keep, src, tgt)


def contract_config(x: str, keep: Iterable[str] | str | Face | None = None) -> ContractionContext:
    """Contract the kept cube vertices at ``x`` (default: all others)."""
    src = CUBE4
    xi = src.label_index(x)
    if keep is None:
        mask = src.full & ~(1 << xi)
    elif isinstance(keep, int):
        mask = keep
    else:
        mask = src.face(keep)
    if mask & (1 << xi):
        raise ContractionError("apex cannot be kept")
    base = corner_simplex(x) & ~(1 << xi)
    if base & ~mask:
        raise MissingCornerBase(src.fmt(base & ~mask))
    return _context(x, mask)


def contract_circuit(ctx: ContractionContext, z: Circuit) -> Circuit:
    """``z/x`` with Radon partition ``(neg minus x)/x | pos/x``."""
    xi = ctx.apex_index
    if not z.support >> xi & 1:
        raise ContractionError("circuit does not contain the apex")
    z = z.oriented(xi)
    neg = ctx.to_target(z.neg)
    pos = ctx.to_target(z.pos)
    return Circuit(neg | pos, neg, pos)


def _require_vertex(T: Triangulation, x: str) -> int:
    xi = T.cfg.label_index(x)
    if not T.vertices >> xi & 1:
        raise NotAVertex(x)
    return xi


def vertex_set_V(T: Triangulation, x: str) -> Face:
    """Source labels of the vertices of the contracted link of ``x``."""
    xi = _require_vertex(T, x)
    v = 0
    for c in T.cells:
        if c >> xi & 1:
            v |= c
    return v & ~(1 << xi)


def contract_link(T: Triangulation, x: str) -> Triangulation:
    """link_T({x})/x as a triangulation of contract_config(x, V_x(T))."""
    xi = _require_vertex(T, x)
    ctx = contract_config(x, vertex_set_V(T, x))
    cells = tuple(ctx.to_target(c) for c in T.cells if c >> xi & 1)
    return Triangulation(ctx.target, cells)


def link_context(T: Triangulation, x: str) -> tuple[ContractionContext, Triangulation]:
    L = contract_link(T, x)
    return contract_config(x, vertex_set_V(T, x)), L


def star_volume_D(T: Triangulation, x: str) -> Fraction:
    xi = _require_vertex(T, x)
    return sum((abs(signed_volume(c, T.cfg)) for c in T.cells if c >> xi & 1), Fraction(0))


# -- the three configurations used by the corner argument ----------------

S_REMOVED = {1: "hnop", 2: "djkp", 3: "fgjkp"}


def s_context(q: int) -> ContractionContext:
    """S_q: the contraction at ``a`` of the cube minus ``S_REMOVED[q]``."""
    keep = CUBE4.full & ~CUBE4.face("a" + S_REMOVED[q])
    ctx = contract_config("a", keep)
    return ctx


def s_config(q: int) -> Config:
    tgt = s_context(q).target
    return Config(tgt.labels, tgt.coords, f"S{q}")
