from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from kpsato.linalg import det, in_row_space, nullspace, rank, rref, solve

from strategies import rationals


def matrices(rows=4, cols=4):
    return st.integers(1, rows).flatmap(lambda r: st.integers(1, cols).flatmap(
        lambda c: st.lists(st.lists(rationals, min_size=c, max_size=c), min_size=r, max_size=r)))


def square(n=4):
    return st.integers(1, n).flatmap(
        lambda k: st.lists(st.lists(rationals, min_size=k, max_size=k), min_size=k, max_size=k))


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == sympy.Matrix(m).rank()


@given(square())
def test_det_matches_sympy(m):
    assert det(m) == Fraction(str(sympy.Matrix(m).det()))


@given(matrices())
def test_nullspace_vectors_are_killed(m):
    basis = nullspace(m)
    assert len(basis) == len(m[0]) - rank(m)
    for v in basis:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


def test_rref_with_column_order():
    rows, pivots = rref([[1, 2], [3, 4]], columns=[1, 0])
    assert pivots == [1, 0]
    assert rows == [[0, 1], [1, 0]]


def test_solve_unique_and_failures():
    assert solve([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    with pytest.raises(ValueError):
        solve([[1, 1], [2, 2]], [1, 3])
    with pytest.raises(ValueError):
        solve([[1, 1], [2, 2]], [1, 2])


def test_row_space_membership():
    assert in_row_space([[1, 0, 1], [0, 1, 1]], [2, 3, 5])
    assert not in_row_space([[1, 0, 1], [0, 1, 1]], [0, 0, 1])
    assert in_row_space([], [0, 0])
