"""Flip-graph exploration, the exhaustive enumeration oracle, and the scan
for triangulations with no apex-reducing flip."""

from __future__ import annotations

import logging
import multiprocessing as mp
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from . import formats
from .complex import Triangulation, placing_triangulation, validate
from .contraction import ContractionContext
from .flips import apply_flip, flippable_moves
from .kernel import CUBE4, Config, Face, bits, determinant, is_independent
from .store import VisitedStore
from .symmetry import (
    SymMap,
    automorphisms,
    canonical_form,
    decode_form,
    group_hash,
    stabilizer_size,
)

log = logging.getLogger(__name__)


class EnumerationError(Exception):
    pass


class CheckpointMismatch(EnumerationError):
    pass


class TooLarge(EnumerationError):
    pass


@dataclass
class EnumerationReport:
    total_triangulations: int
    symmetry_classes: int | None
    flips_traversed: int
    max_frontier: int
    levels: int
    complete: bool
    checkpoint: str | None = None
    forms: list[bytes] | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "triangulations": self.total_triangulations,
            "classes": self.symmetry_classes,
            "flips": self.flips_traversed,
            "max_frontier": self.max_frontier,
            "levels": self.levels,
            "complete": int(self.complete),
        }


# -- python expansion (also used by worker processes) ---------------------

_WORKER: dict = {}


def _init_worker(cfg: Config, G: tuple[SymMap, ...]) -> None:
    _WORKER["cfg"] = cfg
    _WORKER["G"] = G


def _expand_one(form: bytes) -> list[bytes]:
    cfg, G = _WORKER["cfg"], _WORKER["G"]
    T = decode_form(form, cfg)
    return [canonical_form(apply_flip(T, m), G) for m in flippable_moves(T)]


def _expand_chunk(forms: Sequence[bytes]) -> list[list[bytes]]:
    return [_expand_one(f) for f in forms]


class _PythonEngine:
    def __init__(self, cfg: Config, G: tuple[SymMap, ...], workers: int):
        self.cfg, self.G = cfg, G
        _init_worker(cfg, G)
        self.pool = None
        if workers > 1:
            ctx = mp.get_context("fork")
            self.pool = ctx.Pool(workers, initializer=_init_worker, initargs=(cfg, G))
            self.workers = workers

    def expand(self, forms: Sequence[bytes]) -> list[list[bytes]]:
        if self.pool is None:
            return _expand_chunk(forms)
        size = max(1, len(forms) // (4 * self.workers))
        chunks = [forms[i : i + size] for i in range(0, len(forms), size)]
        out = []
        for part in self.pool.map(_expand_chunk, chunks):
            out.extend(part)
        return out

    def orbit(self, form: bytes) -> int:
        if not self.G:
            return 1
        return len(self.G) // stabilizer_size(decode_form(form, self.cfg), self.G)

    def orbits(self, forms: Sequence[bytes]) -> list[int]:
        return [self.orbit(f) for f in forms]

    def close(self):
        if self.pool is not None:
            self.pool.close()
            self.pool.join()


def _make_engine(cfg: Config, G, workers: int, engine: str):
    if engine == "auto":
        engine = "numba" if cfg == CUBE4 and G else "python"
    if engine == "numba":
        from ._fast import Cube4Engine

        if cfg != CUBE4:
            raise EnumerationError("the numba engine only handles the 4-cube")
        return Cube4Engine(G)
    return _PythonEngine(cfg, G, workers)


def explore_flip_graph(
    cfg: Config,
    seed: Triangulation | None = None,
    mod_symmetry: bool = False,
    checkpoint: str | os.PathLike | None = None,
    *,
    workers: int = 1,
    engine: str = "auto",
    max_levels: int | None = None,
    checkpoint_every: float = 0.0,
    budget: int = 10_000_000,
    collect: bool = False,
    count_classes: bool = True,
    progress: Callable[[int, int, int], None] | None = None,
) -> EnumerationReport:
    """Breadth-first search of the flip-graph component of ``seed``.

    With ``mod_symmetry`` the nodes are isometry classes (canonical forms
    under ``automorphisms(cfg)``) and the total is the sum of orbit sizes.
    If ``checkpoint`` names an existing file, the search resumes from it;
    the file is rewritten at level boundaries (at most every
    ``checkpoint_every`` seconds) and when ``max_levels`` stops the run.
    """
    G = automorphisms(cfg) if mod_symmetry else ()
    cfg_hash = cfg.identity_hash
    grp_hash = group_hash(G)
    visited = VisitedStore(budget=budget)
    total = flips = max_frontier = level = 0

    if checkpoint is not None and os.path.exists(checkpoint):
        cp = formats.read_checkpoint(checkpoint)
        if cp.config_hash != cfg_hash or cp.group_hash != grp_hash:
            raise CheckpointMismatch(f"{checkpoint} was written for another configuration or group")
        visited.update(cp.visited)
        frontier = list(cp.frontier)
        total, flips, max_frontier, level = cp.total, cp.flips, cp.max_frontier, cp.level
        log.info("resumed at level %d with %d classes", level, len(visited))
    else:
        if seed is None:
            seed = placing_triangulation(cfg)
        validate(seed)
        start = canonical_form(seed, G)
        frontier = [start]
        visited.add(start)
        eng0 = _PythonEngine(cfg, G, 1)
        total = eng0.orbit(start)
        max_frontier = 1

    eng = _make_engine(cfg, G, workers, engine)
    last_cp = time.monotonic()
    levels_run = 0

    def save():
        if checkpoint is not None:
            formats.write_checkpoint(
                checkpoint,
                formats.Checkpoint(cfg_hash, grp_hash, level, total, flips, max_frontier, list(visited), sorted(frontier)),
            )

    try:
        while frontier:
            if max_levels is not None and levels_run >= max_levels:
                save()
                return EnumerationReport(total, len(visited) if G else None, flips, max_frontier, level, False,
                                         str(checkpoint) if checkpoint else None)
            results = eng.expand(frontier)
            nxt = []
            for neigh in results:
                flips += len(neigh)
                for f in neigh:
                    if visited.add(f):
                        nxt.append(f)
            total += sum(eng.orbits(nxt))
            frontier = sorted(nxt)
            level += 1
            levels_run += 1
            max_frontier = max(max_frontier, len(frontier))
            if progress is not None:
                progress(level, len(visited), total)
            if checkpoint is not None and time.monotonic() - last_cp >= checkpoint_every:
                save()
                last_cp = time.monotonic()
    finally:
        eng.close()

    forms = list(visited) if collect or (count_classes and not G) else None
    if G:
        classes = len(visited)
    elif count_classes and len(visited) <= 2_000_000:
        Gfull = automorphisms(cfg)
        classes = len({canonical_form(decode_form(f, cfg), Gfull) for f in forms})
    else:
        classes = None
    report = EnumerationReport(total, classes, flips, max_frontier, level, True,
                               str(checkpoint) if checkpoint else None, forms if collect else None)
    if checkpoint is not None:
        save()
    visited.close()
    return report


def flip_graph_triangulations(cfg: Config, seed: Triangulation | None = None) -> list[Triangulation]:
    """All triangulations in the flip-graph component of ``seed``."""
    rep = explore_flip_graph(cfg, seed, collect=True, count_classes=False)
    return [decode_form(f, cfg) for f in rep.forms]


# -- exhaustive oracle -----------------------------------------------------


def _side(cfg: Config, facet: list[int], p: int) -> int:
    from .complex import _orientation

    return _orientation(cfg, facet, p)


def _orient_pts(pts) -> int:
    base = pts[0]
    det = determinant([[a - b for a, b in zip(q, base)] for q in pts[1:]])
    return (det > 0) - (det < 0)


def _generic_point(cfg: Config, facets: list[Face]):
    """An interior point of the hull off every hyperplane spanned by a facet."""
    pts = cfg.chart_coords
    d = cfg.affine_dim
    centre = [sum(p[j] for p in pts) / len(pts) for j in range(d)]
    primes = [Fraction(1, pr) for pr in (1009, 1013, 1019, 1021, 1031, 1033, 1039, 1049)]
    for scale in range(1, 100):
        q = tuple(centre[j] + primes[j % len(primes)] / (scale * (j + 1)) for j in range(d))
        if all(_orient_pts([pts[i] for i in bits(f)] + [q]) != 0 for f in facets):
            return q
    raise EnumerationError("no generic interior point found")  # pragma: no cover


def _contains(cfg: Config, cell: Face, q) -> bool:
    pts = cfg.chart_coords
    idx = bits(cell)
    for v in idx:
        facet = [pts[i] for i in idx if i != v]
        if _orient_pts(facet + [q]) != _orient_pts(facet + [pts[v]]):
            return False
    return True


class _CellSearch:
    """Cells, facets and pairwise conflicts of a configuration, shared by the
    exhaustive oracle and by :func:`complete_triangulation`."""

    def __init__(self, cfg: Config):
        import itertools

        n, d = len(cfg), cfg.affine_dim
        self.cfg = cfg
        self.cells = cells = [
            sum(1 << i for i in idx)
            for idx in itertools.combinations(range(n), d + 1)
            if is_independent(sum(1 << i for i in idx), cfg)
        ]
        self.index = {c: k for k, c in enumerate(cells)}
        # facets and whether they lie on the hull boundary
        self.facets: dict[Face, list[int]] = {}
        for k, c in enumerate(cells):
            for v in bits(c):
                self.facets.setdefault(c & ~(1 << v), []).append(k)
        self.boundary = set()
        for f in self.facets:
            idx = bits(f)
            signs = {_side(cfg, idx, p) for p in range(n) if not f >> p & 1}
            signs.discard(0)
            if len(signs) <= 1:
                self.boundary.add(f)
        # conflicts through circuits: neg inside one cell, pos inside the other
        self.conflict = conflict = [0] * len(cells)
        holders: dict[Face, int] = {}

        def holding(side: Face) -> int:
            if side not in holders:
                holders[side] = sum(1 << k for k, c in enumerate(cells) if c & side == side)
            return holders[side]

        for z in cfg.circuits:
            a, b = holding(z.neg), holding(z.pos)
            for k in bits(a):
                conflict[k] |= b
            for k in bits(b):
                conflict[k] |= a

    def search(self, roots: Iterable[int], start: Sequence[int] = (), first_only: bool = False) -> list[Triangulation]:
        cells, facets, boundary, conflict = self.cells, self.facets, self.boundary, self.conflict
        out: list[Triangulation] = []
        chosen: list[int] = []
        count: dict[Face, int] = {}

        def add(k: int):
            chosen.append(k)
            c = cells[k]
            for v in bits(c):
                f = c & ~(1 << v)
                count[f] = count.get(f, 0) + 1

        def remove(k: int):
            chosen.pop()
            c = cells[k]
            for v in bits(c):
                f = c & ~(1 << v)
                count[f] -= 1
                if count[f] == 0:
                    del count[f]

        def rec(forbidden: int) -> bool:
            open_f = None
            for f, m in count.items():
                if m == 1 and f not in boundary and (open_f is None or f < open_f):
                    open_f = f
            if open_f is None:
                out.append(Triangulation(self.cfg, tuple(cells[k] for k in chosen)))
                return first_only
            for k in facets[open_f]:
                if forbidden >> k & 1 or k in chosen:
                    continue
                add(k)
                done = rec(forbidden | conflict[k])
                remove(k)
                if done:
                    return True
            return False

        forbidden = 0
        for k in start:
            if forbidden >> k & 1:
                return []
            add(k)
            forbidden |= conflict[k]
        for k in roots:
            if forbidden >> k & 1 or k in chosen:
                continue
            add(k)
            done = rec(forbidden | conflict[k])
            remove(k)
            if done:
                break
        return out


def enumerate_all_triangulations(cfg: Config, force: bool = False) -> list[Triangulation]:
    """Every triangulation of ``cfg`` by extension backtracking.

    A search node is a set of pairwise properly intersecting cells. The root
    branches on the cells containing a fixed generic interior point;
    afterwards the smallest interior facet with a single incident cell is
    closed, branching on the cells that can be glued to it. Each
    triangulation is reached along exactly one branch, and the search never
    uses flips.
    """
    n, d = len(cfg), cfg.affine_dim
    if not force and ((d <= 3 and n > 12) or (d >= 4 and n > 8)):
        raise TooLarge(f"{n} points in dimension {d}; pass force=True")
    S = _CellSearch(cfg)
    if not S.cells:
        return []
    q = _generic_point(cfg, list(S.facets))
    roots = [k for k, c in enumerate(S.cells) if _contains(cfg, c, q)]
    return S.search(roots)


@lru_cache(maxsize=8)
def _cell_search(cfg: Config) -> _CellSearch:
    return _CellSearch(cfg)


def complete_triangulation(cfg: Config, cells: Iterable[Face]) -> Triangulation | None:
    """Some triangulation of ``cfg`` containing all of ``cells``, or None."""
    S = _cell_search(cfg)
    try:
        start = [S.index[c] for c in cells]
    except KeyError:
        return None
    if not start:
        found = S.search(range(len(S.cells)), first_only=True)
    else:
        found = S.search(start[:1], start[1:], first_only=True)
    return found[0] if found else None


# -- reduction-free links ---------------------------------------------------


def _link_cells(T: Triangulation, f: Face) -> tuple[Face, ...]:
    return tuple(sorted(c & ~f for c in T.cells if c & f == f))


def lx_circuits(ctx: ContractionContext, quantifier: str = "contracted") -> list[tuple[Face, Face, Face]]:
    """(support, side kept by the flip test, opposite side) triples on ctx.target.

    ``contracted``: z/x for z in Z(x) supported in the kept set, removable
    side eps^-(z)/x. ``native``: every circuit of the target configuration;
    contractions keep their eps^- orientation, the others are tried with
    both sides.
    """
    contracted = [(zc.support, zc.neg, zc.pos) for _, zc in ctx.circuits]
    if quantifier == "contracted":
        return contracted
    if quantifier != "native":
        raise ValueError(quantifier)
    known = {s: (n, p) for s, n, p in contracted}
    out = []
    for z in ctx.target.circuits:
        if z.support in known:
            n, p = known[z.support]
            out.append((z.support, n, p))
        else:
            out.append((z.support, z.neg, z.pos))
            out.append((z.support, z.pos, z.neg))
    return out


def reduction_free_links(
    x: str, ctx: ContractionContext, trias: Iterable[Triangulation], quantifier: str = "contracted"
) -> list[Triangulation]:
    """Triangulations of ctx.target in which no circuit z/x is flippable
    with eps^-(z)/x a face."""
    if ctx.apex != x:
        raise ValueError("context apex differs from x")
    circuits = lx_circuits(ctx, quantifier)
    result = []
    for T in trias:
        if T.cfg != ctx.target:
            raise ValueError("triangulation is not over the contracted configuration")
        faces = T.faces
        f1 = 0
        for support, _minus, plus in circuits:
            lam = None
            f2 = 1
            for y in bits(plus):
                f = support & ~(1 << y)
                if f in faces:
                    lk = _link_cells(T, f)
                    if lam is None:
                        lam = lk
                    elif lam != lk:
                        f2 = 0
                else:
                    f2 = 0
            if f2 == 1:
                f1 = 1
                break
        if f1 == 0:
            result.append(T)
    return result


algorithm1_Lx = reduction_free_links
