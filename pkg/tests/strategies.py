"""Hypothesis strategies shared by the property tests."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from kpsato.series import TruncatedLaurent, TruncatedSeries

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def series(order: int = 6):
    return st.lists(rationals, min_size=0, max_size=order + 1).map(lambda c: TruncatedSeries(c, order))


def units(order: int = 6):
    return st.tuples(rationals.filter(bool), st.lists(rationals, max_size=order)).map(
        lambda p: TruncatedSeries([p[0], *p[1]], order))


def laurent(order: int = 8, lowest: int = -4):
    return st.tuples(st.integers(lowest, 0), st.lists(rationals, max_size=6)).map(
        lambda p: TruncatedLaurent(p[0], p[1], order))
