"""Exact integer and rational linear algebra for structural invariants."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np


def _rows(matrix) -> list[list[int]]:
    m = np.asarray(matrix, dtype=object)
    if m.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    out = []
    for row in m.tolist():
        r = []
        for x in row:
            if int(x) != x:
                raise ValueError(f"non-integer entry {x!r}")
            r.append(int(x))
        out.append(r)
    return out


def exact_rank(matrix) -> int:
    """Rank over the rationals by Bareiss fraction-free elimination.

    All intermediate values stay integers; every division is exact.
    """
    a = _rows(matrix)
    if not a or not a[0]:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, n_rows):
            for c in range(col + 1, n_cols):
                num = a[r][c] * p - a[rank][c] * a[r][col]
                q, rem = divmod(num, prev)
                assert rem == 0, "Bareiss division must be exact"
                a[r][c] = q
            a[r][col] = 0
        prev = p
        rank += 1
    return rank


def rref(matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over :class:`Fraction`, with pivot columns."""
    a = [[Fraction(x) for x in row] for row in np.asarray(matrix, dtype=object).tolist()]
    if not a:
        return a, []
    n_rows, n_cols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        p = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return a, pivots


def null_space(matrix, n_cols: int | None = None) -> list[list[Fraction]]:
    """Exact basis of ``{x : A x = 0}`` as rational vectors."""
    rows = np.asarray(matrix, dtype=object)
    if n_cols is None:
        n_cols = rows.shape[1] if rows.ndim == 2 else 0
    if rows.size == 0:
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    a, pivots = rref(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -a[r][f]
        basis.append(v)
    return basis


def left_null_space(matrix, n_rows: int | None = None) -> list[list[Fraction]]:
    """Exact basis of ``{v : v^T A = 0}``."""
    m = np.asarray(matrix, dtype=object)
    if n_rows is None:
        n_rows = m.shape[0]
    if m.ndim != 2 or m.shape[1] == 0:
        return null_space(np.zeros((0, n_rows), dtype=object), n_rows)
    return null_space(m.T, n_rows)


def primitive(v: Sequence[Fraction]) -> list[Fraction]:
    """Scale a rational vector to coprime integers, keeping its sign pattern."""
    den = lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    g = g or 1
    return [Fraction(x // g) for x in ints]
