from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given

from kpsato.errors import ParseError
from kpsato.parsing import parse_laurent, parse_series
from kpsato.series import TruncatedLaurent, TruncatedSeries

from strategies import laurent, series


def test_series_literal():
    s = parse_series("3/2 + x - 5*x^3", 6)
    assert s.identical(TruncatedSeries([Fraction(3, 2), 1, 0, -5], 6))


def test_laurent_literal_with_modulus():
    v = parse_laurent("z^-2 + 1 + z (mod z^8)")
    assert v.identical(TruncatedLaurent.from_dict({-2: 1, 0: 1, 1: 1}, 7))


def test_powers_and_parentheses():
    assert parse_series("(1 + x)^3", 5).identical(TruncatedSeries([1, 3, 3, 1], 5))


def test_mixed_precision_terms_align():
    assert parse_laurent("z^-1*z + 1", 10) == TruncatedLaurent.from_dict({0: 2}, 10)


@pytest.mark.parametrize("text, position, expected", [
    ("x +", 3, "a number, a name or '('"),
    ("2*(x", 4, "')'"),
    ("x^", 2, "an integer exponent"),
    ("y", 0, "a known symbol"),
])
def test_errors_report_position_and_expectation(text, position, expected):
    with pytest.raises(ParseError) as info:
        parse_series(text, 4)
    assert info.value.position == position
    assert info.value.expected == expected
    assert "^" in str(info.value)


@given(series(7))
def test_series_round_trip(a):
    assert parse_series(str(a), 3).identical(a)


@given(laurent(9))
def test_laurent_round_trip(v):
    assert parse_laurent(str(v)).identical(v)
