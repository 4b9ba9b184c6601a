from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from kpsato.errors import ConfigurationError, NonUnitError
from kpsato.series import DualScalar, TruncatedLaurent, TruncatedSeries

from strategies import laurent, rationals, series, units


def S(coeffs, order=6):
    return TruncatedSeries(coeffs, order)


def test_difference_of_squares():
    assert (S([1, 1], 4) * S([1, -1], 4)).identical(S([1, 0, -1], 4))


def test_multiplying_by_one():
    a = S([3, Fraction(1, 2), -2])
    assert (a * TruncatedSeries.one(6)).identical(a)


def convolve(a, b, order):
    # brute-force Cauchy product
    return [sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(order + 1)]


def test_square_of_exponential():
    exp = [Fraction(1, math.factorial(n)) for n in range(7)]
    expected = [Fraction(2 ** n, math.factorial(n)) for n in range(7)]
    assert convolve(exp, exp, 6) == expected
    assert (S(exp) * S(exp)).identical(S(expected))


def test_mismatched_orders_rejected():
    with pytest.raises(ConfigurationError):
        S([1], 4) * S([1], 5)


def test_inverse_examples():
    assert TruncatedSeries.one(6).inverse().identical(TruncatedSeries.one(6))
    assert S([1, -1]).inverse().identical(S([1] * 7))
    inv = S([2, 1]).inverse()
    assert inv.identical(S([Fraction((-1) ** n, 2 ** (n + 1)) for n in range(7)]))
    assert (inv * S([2, 1])).identical(TruncatedSeries.one(6))


def test_inverse_of_non_unit():
    with pytest.raises(NonUnitError):
        S([0, 1]).inverse()


def test_derivative():
    assert TruncatedSeries.monomial(2, 5).deriv().identical(S([0, 2], 4))
    assert TruncatedSeries.constant(7, 5).deriv().is_zero()
    d = S([1, 1, Fraction(1, 2)], 5).deriv()
    assert d.identical(S([1, 1], 4))
    assert d.order == 4


def test_laurent_examples():
    z = lambda e: TruncatedLaurent.monomial(e, 8)
    assert z(-1) * z(2) == z(1)
    assert (z(-3) + z(1)).valuation() == -3
    product = (z(-1) + z(0)) * (z(-1) - z(0))
    assert product == z(-2) - z(0)
    # the unknown tail of each factor is multiplied by z^-1
    assert product.order == 7


def test_zero_laurent_has_no_leading_term():
    zero = TruncatedLaurent.zero(6)
    assert zero.is_zero()
    assert zero.items() == []


def test_leading_coefficient_normalized():
    v = TruncatedLaurent(-3, [0, 0, 5, 1], 6)
    assert v.valuation() == -1
    assert v.leading_coefficient() == 5


def test_dual_numbers():
    a, b = DualScalar(1, 2), DualScalar(3, 4)
    assert a * b == DualScalar(3, 10)
    eps = DualScalar(0, 1)
    assert eps * eps == DualScalar(0, 0)
    assert (a * a.inverse()) == DualScalar(1, 0)


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert ((a * b) * c).identical(a * (b * c))
    assert (a * (b + c)).identical(a * b + a * c)
    assert (a * b).identical(b * a)
    assert (a + b).identical(b + a)


@given(units())
def test_inverse_is_two_sided(a):
    one = TruncatedSeries.one(a.order)
    assert (a * a.inverse()).identical(one)
    assert (a.inverse() * a).identical(one)


@given(series(8), series(8))
def test_truncation_monotonicity(a, b):
    low = (a.truncate(4) * b.truncate(4))
    assert (a * b).truncate(4).identical(low)


@given(rationals, rationals, rationals, rationals)
def test_dual_product_rule(a, b, c, d):
    assert DualScalar(a, b) * DualScalar(c, d) == DualScalar(a * c, a * d + b * c)


def plus(a, b):
    n = min(a.order, b.order)
    return a.truncate(n) + b.truncate(n)


def times(a, b):
    n = min(a.order, b.order)
    return a.truncate(n) * b.truncate(n)


@settings(max_examples=50)
@given(laurent(), laurent(), laurent())
def test_laurent_ring_axioms(a, b, c):
    assert times(a * b, c) == times(a, b * c)
    assert times(a, plus(b, c)) == plus(a * b, a * c)
    assert (a * b).identical(b * a)


@given(laurent(), laurent())
def test_laurent_product_precision_is_honest(a, b):
    # recomputing from more precise factors agrees on the declared order
    hi = (a.truncate(a.order) * b)
    lo = a.truncate(a.order - 2) * b.truncate(b.order - 2)
    assert lo.order <= hi.order
    assert hi.truncate(lo.order) == lo


@given(laurent())
def test_laurent_valuation_additive(a):
    z = TruncatedLaurent.monomial(2, 8)
    if not a.is_zero():
        assert (a * z).valuation() == a.valuation() + 2
