"""Exact dense linear algebra over the rationals.

Matrices are lists of rows; entries are Fractions (ints are accepted).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def _copy(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(c) for c in row] for row in rows]


def rref(rows: Sequence[Sequence], columns: Sequence[int] | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form.

    ``columns`` gives the order in which columns are tried as pivots (default
    left to right).  Returns the nonzero reduced rows and their pivot columns.
    """
    m = _copy(rows)
    if not m:
        return [], []
    width = len(m[0])
    order = list(range(width)) if columns is None else list(columns)
    pivots: list[int] = []
    r = 0
    for col in order:
        if r == len(m):
            break
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        lead = m[r][col]
        if lead != 1:
            m[r] = [c / lead for c in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], width: int | None = None) -> Matrix:
    """Basis of {v : rows * v = 0}."""
    if not rows:
        if width is None:
            raise ValueError("width needed for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(width)] for i in range(width)]
    width = len(rows[0]) if width is None else width
    reduced, pivots = rref(rows)
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * width
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique solution of a x = b; raises ValueError otherwise."""
    width = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    reduced, pivots = rref(aug)
    if width in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) < width:
        raise ValueError("linear system has no unique solution")
    x = [Fraction(0)] * width
    for row, p in zip(reduced, pivots):
        x[p] = row[width]
    return x


def det(a: Sequence[Sequence]) -> Fraction:
    m = _copy(a)
    n = len(m)
    result = Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if m[i][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            result = -result
        lead = m[col][col]
        result *= lead
        for i in range(col + 1, n):
            if m[i][col] != 0:
                f = m[i][col] / lead
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return result


def in_row_space(rows: Sequence[Sequence], v: Sequence) -> bool:
    if not rows:
        return all(c == 0 for c in v)
    return rank(list(rows) + [list(v)]) == rank(rows)
