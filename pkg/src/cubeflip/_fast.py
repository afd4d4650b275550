"""Compiled flip expansion and canonical forms for the 4-cube.

Works on the same canonical encoding as :mod:`cubeflip.symmetry`: the
cells, relabelled by the group element giving the smallest result, sorted,
as big-endian 16-bit masks.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numba import njit

from .kernel import CUBE4

MAX_CELLS = 24  # 4-cube volume over the smallest unimodular simplex volume
CHUNK = 2048


@njit(cache=True)
def _map_sorted(cells, n, lo, hi, g, out):
    for k in range(n):
        c = cells[k]
        v = lo[g, c & 0xFF] | hi[g, c >> 8]
        j = k
        while j > 0 and out[j - 1] > v:
            out[j] = out[j - 1]
            j -= 1
        out[j] = v


@njit(cache=True)
def _canon(cells, n, lo, hi, best, tmp):
    """Writes the canonical cell list to ``best``; returns the stabilizer order."""
    _map_sorted(cells, n, lo, hi, 0, best)
    ties = 1
    for g in range(1, lo.shape[0]):
        _map_sorted(cells, n, lo, hi, g, tmp)
        cmp = 0
        for k in range(n):
            if tmp[k] != best[k]:
                cmp = -1 if tmp[k] < best[k] else 1
                break
        if cmp < 0:
            for k in range(n):
                best[k] = tmp[k]
            ties = 1
        elif cmp == 0:
            ties += 1
    return ties


@njit(cache=True)
def _mark(cells, n, table, value):
    for k in range(n):
        c = cells[k]
        s = c
        while True:
            table[s] = value
            if s == 0:
                break
            s = (s - 1) & c


@njit(cache=True)
def _link(cells, n, f, out):
    m = 0
    for k in range(n):
        c = cells[k]
        if c & f == f:
            v = c & ~f
            j = m
            while j > 0 and out[j - 1] > v:
                out[j] = out[j - 1]
                j -= 1
            out[j] = v
            m += 1
    return m


@njit(cache=True)
def _expand(cells2d, lens, sup, neg, pos, lo, hi, table, out, out_len, owner):
    """Canonical forms of all flip neighbours; returns how many were written
    or -1 when ``out`` is too small."""
    cap = out.shape[0]
    w = 0
    lam = np.empty(MAX_CELLS, np.int64)
    lk = np.empty(MAX_CELLS, np.int64)
    drop = np.empty(4 * MAX_CELLS, np.int64)
    new = np.empty(2 * MAX_CELLS, np.int64)
    best = np.empty(MAX_CELLS, np.int64)
    tmp = np.empty(MAX_CELLS, np.int64)
    for t in range(cells2d.shape[0]):
        n = lens[t]
        cells = cells2d[t]
        _mark(cells, n, table, 1)
        for i in range(sup.shape[0]):
            z = sup[i]
            if table[neg[i]]:
                side, other = neg[i], pos[i]
            elif table[pos[i]]:
                side, other = pos[i], neg[i]
            else:
                continue
            ok = True
            nl = -1
            rest = other
            while rest:
                y = rest & -rest
                rest ^= y
                f = z & ~y
                if not table[f]:
                    ok = False
                    break
                if nl < 0:
                    nl = _link(cells, n, f, lam)
                else:
                    m = _link(cells, n, f, lk)
                    if m != nl:
                        ok = False
                        break
                    for k in range(m):
                        if lk[k] != lam[k]:
                            ok = False
                            break
                    if not ok:
                        break
            if not ok:
                continue
            nd = 0
            rest = other
            while rest:
                y = rest & -rest
                rest ^= y
                for k in range(nl):
                    drop[nd] = lam[k] | (z & ~y)
                    nd += 1
            nn = 0
            for k in range(n):
                c = cells[k]
                gone = False
                for j in range(nd):
                    if drop[j] == c:
                        gone = True
                        break
                if not gone:
                    new[nn] = c
                    nn += 1
            rest = side
            while rest:
                y = rest & -rest
                rest ^= y
                for k in range(nl):
                    new[nn] = lam[k] | (z & ~y)
                    nn += 1
            if w >= cap or nn > MAX_CELLS:
                _mark(cells, n, table, 0)
                return -1
            _canon(new, nn, lo, hi, best, tmp)
            for k in range(nn):
                out[w, k] = best[k]
            out_len[w] = nn
            owner[w] = t
            w += 1
        _mark(cells, n, table, 0)
    return w


@njit(cache=True)
def _orbit_sizes(cells2d, lens, lo, hi):
    res = np.empty(cells2d.shape[0], np.int64)
    best = np.empty(MAX_CELLS, np.int64)
    tmp = np.empty(MAX_CELLS, np.int64)
    G = lo.shape[0]
    for t in range(cells2d.shape[0]):
        res[t] = G // _canon(cells2d[t], lens[t], lo, hi, best, tmp)
    return res


def _tables(G: Sequence[tuple[int, ...]]) -> tuple[np.ndarray, np.ndarray]:
    lo = np.zeros((len(G), 256), np.int64)
    hi = np.zeros((len(G), 256), np.int64)
    for gi, g in enumerate(G):
        for b in range(256):
            vlo = vhi = 0
            for i in range(8):
                if b >> i & 1:
                    vlo |= 1 << g[i]
                    vhi |= 1 << g[i + 8]
            lo[gi, b], hi[gi, b] = vlo, vhi
    return lo, hi


def _pack(forms: Sequence[bytes]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.zeros((len(forms), MAX_CELLS), np.int64)
    lens = np.empty(len(forms), np.int64)
    for i, f in enumerate(forms):
        v = np.frombuffer(f, ">u2")
        arr[i, : len(v)] = v
        lens[i] = len(v)
    return arr, lens


class Cube4Engine:
    """Drop-in replacement for the pure-Python expansion engine on the 4-cube."""

    def __init__(self, G: Sequence[tuple[int, ...]]):
        if not G:
            raise ValueError("the compiled engine needs a symmetry group")
        self.G = tuple(G)
        self.lo, self.hi = _tables(self.G)
        circ = CUBE4.circuits
        self.sup = np.array([z.support for z in circ], np.int64)
        self.neg = np.array([z.neg for z in circ], np.int64)
        self.pos = np.array([z.pos for z in circ], np.int64)
        self.table = np.zeros(1 << len(CUBE4), np.uint8)
        self._cap = CHUNK * 64

    def _expand_chunk(self, forms: Sequence[bytes]) -> list[list[bytes]]:
        arr, lens = _pack(forms)
        while True:
            out = np.zeros((self._cap, MAX_CELLS), np.int64)
            out_len = np.empty(self._cap, np.int64)
            owner = np.empty(self._cap, np.int64)
            w = _expand(arr, lens, self.sup, self.neg, self.pos, self.lo, self.hi, self.table,
                        out, out_len, owner)
            if w >= 0:
                break
            self._cap *= 2
        res: list[list[bytes]] = [[] for _ in forms]
        be = out[:w].astype(">u2")
        for k in range(w):
            res[owner[k]].append(be[k, : out_len[k]].tobytes())
        return res

    def expand(self, forms: Sequence[bytes]) -> list[list[bytes]]:
        out: list[list[bytes]] = []
        for i in range(0, len(forms), CHUNK):
            out.extend(self._expand_chunk(forms[i : i + CHUNK]))
        return out

    def orbits(self, forms: Sequence[bytes]) -> list[int]:
        if not forms:
            return []
        arr, lens = _pack(forms)
        return [int(v) for v in _orbit_sizes(arr, lens, self.lo, self.hi)]

    def orbit(self, form: bytes) -> int:
        return self.orbits([form])[0]

    def close(self) -> None:
        pass
