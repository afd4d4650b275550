"""Exact simplex method over the rationals.

Solves ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0`` (the origin is
feasible, so no phase one is needed). Bland's rule rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class Unbounded(ArithmeticError):
    pass


@dataclass
class LPResult:
    value: Fraction
    x: list[Fraction]
    dual: list[Fraction]
    pivots: int


def maximize(A: Sequence[Sequence], b: Sequence, c: Sequence, max_pivots: int = 100_000) -> LPResult:
    m, n = len(A), len(c)
    T = [[Fraction(v) for v in row] for row in A]
    rhs = [Fraction(v) for v in b]
    obj = [Fraction(v) for v in c]
    if any(v < 0 for v in rhs):
        raise ValueError("origin must be feasible (b >= 0)")
    z0 = Fraction(0)
    nonbasic = list(range(n))  # variable ids; slacks are n..n+m-1
    basic = list(range(n, n + m))
    pivots = 0
    while True:
        entering = None
        for k in sorted(range(n), key=lambda k: nonbasic[k]):
            if obj[k] > 0:
                entering = k
                break
        if entering is None:
            break
        j = entering
        leave = None
        best = None
        for i in range(m):
            a = T[i][j]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basic[i] < basic[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise Unbounded("objective unbounded")
        i = leave
        piv = T[i][j]
        row = T[i]
        row = [v / piv for v in row]
        row[j] = 1 / piv
        rhs_i = rhs[i] / piv
        T[i], rhs[i] = row, rhs_i
        for r in range(m):
            if r == i:
                continue
            f = T[r][j]
            if f == 0:
                continue
            Tr = T[r]
            for k in range(n):
                if k != j and row[k] != 0:
                    Tr[k] -= f * row[k]
            Tr[j] = -f / piv
            rhs[r] -= f * rhs_i
        cj = obj[j]
        for k in range(n):
            if k != j and row[k] != 0:
                obj[k] -= cj * row[k]
        obj[j] = -cj / piv
        z0 += cj * rhs_i
        nonbasic[j], basic[i] = basic[i], nonbasic[j]
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("pivot limit reached")

    x = [Fraction(0)] * n
    for i, var in enumerate(basic):
        if var < n:
            x[var] = rhs[i]
    dual = [Fraction(0)] * m
    for k, var in enumerate(nonbasic):
        if var >= n:
            dual[var - n] = -obj[k]
    return LPResult(z0, x, dual, pivots)


def check_optimality(A, b, c, res: LPResult) -> bool:
    """Primal feasibility, dual feasibility and equal objective values."""
    m, n = len(A), len(c)
    if any(v < 0 for v in res.x) or any(v < 0 for v in res.dual):
        return False
    for i in range(m):
        if sum(Fraction(A[i][k]) * res.x[k] for k in range(n)) > b[i]:
            return False
    for k in range(n):
        if sum(Fraction(A[i][k]) * res.dual[i] for i in range(m)) < c[k]:
            return False
    primal = sum(Fraction(c[k]) * res.x[k] for k in range(n))
    dual = sum(Fraction(b[i]) * res.dual[i] for i in range(m))
    return primal == dual == res.value
