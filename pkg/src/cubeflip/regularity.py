"""Height-function certificates and an exact regularity test."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .complex import Triangulation
from .kernel import Config, Face, bits, nullspace
from .lp import check_optimality, maximize

HeightFunction = Mapping[str, Fraction]


class SingularFace(ValueError):
    pass


@lru_cache(maxsize=200_000)
def barycentric(cfg: Config, cell: Face) -> dict[int, tuple[Fraction, ...]]:
    """Affine coordinates of every point outside ``cell`` w.r.t. its vertices."""
    idx = bits(cell)
    cols = [cfg.homogeneous[i] for i in idx]
    out = {}
    for q in range(len(cfg)):
        if cell >> q & 1:
            continue
        # solve sum beta_v (1, v) = (1, q) through the kernel of [cols | -q]
        ker = nullspace(cols + [tuple(-v for v in cfg.homogeneous[q])])
        if len(ker) != 1 or ker[0][-1] == 0:
            raise SingularFace(cfg.fmt(cell))
        vec = ker[0]
        scale = vec[-1]
        # homogeneous columns are positive multiples of (1, p); undo the scaling
        beta = [vec[k] / scale * cfg.homogeneous[i][0] / cfg.homogeneous[q][0] for k, i in enumerate(idx)]
        out[q] = tuple(beta)
    return out


def affine_interpolation(cfg: Config, cell: Face, heights: list[Fraction]) -> dict[int, Fraction]:
    """Values at points outside ``cell`` of the affine map matching ``heights`` on it."""
    idx = bits(cell)
    return {q: sum((beta[k] * heights[i] for k, i in enumerate(idx)), Fraction(0))
            for q, beta in barycentric(cfg, cell).items()}


def _as_list(T: Triangulation, w: HeightFunction | list) -> list[Fraction]:
    if isinstance(w, Mapping):
        return [Fraction(w[lab]) for lab in T.cfg.labels]
    return [Fraction(v) for v in w]


def verify_certificate(T: Triangulation, w: HeightFunction | list) -> bool:
    """True iff every cell's affine interpolation of ``w`` lies strictly
    below ``w`` at all other points of the configuration."""
    heights = _as_list(T, w)
    for c in T.cells:
        for q, val in affine_interpolation(T.cfg, c, heights).items():
            if not val < heights[q]:
                return False
    return True


def regularity_lp(T: Triangulation):
    """(A, b, c, variables) of the slack-maximisation LP.

    Heights of the first cell are pinned to zero, the remaining heights are
    nonnegative variables, the last variable is the common slack ``s <= 1``.
    """
    cfg = T.cfg
    base = T.cells[0]
    free = [q for q in range(len(cfg)) if not base >> q & 1]
    col = {q: k for k, q in enumerate(free)}
    nvar = len(free) + 1
    A, b = [], []
    for c in T.cells:
        idx = bits(c)
        for q, beta in barycentric(cfg, c).items():
            row = [Fraction(0)] * nvar
            for k, v in enumerate(idx):
                if v in col:
                    row[col[v]] += beta[k]
            if q in col:
                row[col[q]] -= 1
            row[-1] = Fraction(1)
            A.append(row)
            b.append(Fraction(0))
    A.append([Fraction(0)] * (nvar - 1) + [Fraction(1)])
    b.append(Fraction(1))
    c = [Fraction(0)] * (nvar - 1) + [Fraction(1)]
    return A, b, c, free


def is_regular(T: Triangulation) -> dict[str, Fraction] | None:
    """A height function certifying regularity, or None.

    The returned heights are scaled so that the smallest slack is 1. A
    ``None`` answer is backed by an exactly re-checked optimal dual.
    """
    A, b, c, free = regularity_lp(T)
    res = maximize(A, b, c)
    if not check_optimality(A, b, c, res):
        raise ArithmeticError("LP optimality certificate failed")  # pragma: no cover
    if res.value <= 0:
        return None
    heights = [Fraction(0)] * len(T.cfg)
    for k, q in enumerate(free):
        heights[q] = res.x[k] / res.value
    w = dict(zip(T.cfg.labels, heights))
    if not verify_certificate(T, w):
        raise ArithmeticError("LP witness failed verification")  # pragma: no cover
    return w


def corner_cut_heights(T: Triangulation) -> dict[str, Fraction] | None:
    """Heights 0 on the diagonal, 1 on the rest of its class, 2 elsewhere,
    for a corner-cut triangulation of the 4-cube."""
    from .complex import is_corner_cut

    cc = is_corner_cut(T)
    if cc is None:
        return None
    s, diag = cc
    cfg = T.cfg
    cls = s.mask(cfg)
    w = {}
    for i, lab in enumerate(cfg.labels):
        if diag >> i & 1:
            w[lab] = Fraction(0)
        elif cls >> i & 1:
            w[lab] = Fraction(1)
        else:
            w[lab] = Fraction(2)
    return w


lemma1_heights = corner_cut_heights
