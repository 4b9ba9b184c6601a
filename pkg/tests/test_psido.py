from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from kpsato.diffpoly import DiffPoly
from kpsato.errors import ConfigurationError, NonUnitError
from kpsato.kp import LaxOperator
from kpsato.parsing import parse_laurent
from kpsato.psido import (POLY, PsiDO, SeriesRing, act_on_v, gen_binomial, parse_operator,
                          sato_image, sato_image_by_rewriting, sato_lift, w0_violation)
from kpsato.sampling import differential_operator, dressing_operator, operator, series
from kpsato.series import TruncatedLaurent, TruncatedSeries

seeds = st.integers(0, 10 ** 6)
RING = SeriesRing(8)


def op(text, depth=6, x_order=8):
    return parse_operator(text, depth=depth, x_order=x_order)


def coefficient_op(f: TruncatedSeries, depth=6):
    return PsiDO({0: f}, depth, SeriesRing(f.order))


def z(e, order=12):
    return TruncatedLaurent.monomial(e, order)


@pytest.mark.parametrize("i, k", [(5, 2), (-1, 3), (-2, 3), (-3, 4), (0, 0), (4, 6), (-7, 1)])
def test_generalized_binomial(i, k):
    assert gen_binomial(i, k) == Fraction(int(sympy.binomial(i, k)))


def test_heisenberg_relation():
    f = op("1 + x + x^3")
    assert op("d").commutator(f) == op("1 + 3*x^2")


def test_inverse_d_commutator_expansion():
    f = op("1 + x + x^3")
    assert op("d^-1").commutator(f) == op("(-1 - 3*x^2)*d^-2 + 6*x*d^-3 - 6*d^-4")


def test_identity_is_neutral():
    P = op("x*d^2 + 3 + x^2*d^-1")
    assert op("1").compose(P) == P
    assert P.compose(op("1")) == P


def test_splitting():
    assert op("d + x*d^-1").minus() == op("x*d^-1")
    assert op("d^2").plus() == op("d^2")
    L2 = LaxOperator.symbolic(4).operator().power(2)
    assert L2.plus() == parse_operator("d^2 + 2*u1", depth=4)
    assert L2.coeff(-1) == DiffPoly.parse("2*u2 + u1'")
    assert L2.coeff(-2) == DiffPoly.parse("2*u3 + u1^2 + u2'")


def test_lax_powers_commute():
    L = LaxOperator.symbolic(5).operator()
    L2 = L.power(2)
    assert L2.compose(L) == L.compose(L2)
    assert op("d").power(4) == op("d^4")


def test_inverse_examples():
    assert op("1").inverse() == op("1")
    S = op("1 + x*d^-1", depth=5)
    assert S.compose(S.inverse()) == op("1", depth=5)
    assert S.inverse().compose(S) == op("1", depth=5)


def test_inverse_requires_unitriangular():
    with pytest.raises(NonUnitError):
        op("d + 1").inverse()
    with pytest.raises(NonUnitError):
        op("2 + d^-1").inverse()


def test_rings_cannot_mix():
    with pytest.raises(ConfigurationError):
        op("d").compose(parse_operator("u1*d^-1", depth=4))


def test_negative_powers_need_depth():
    with pytest.raises(ConfigurationError):
        PsiDO({-1: RING.one()}, None, RING)


def test_sato_image_examples():
    for n in range(7):
        assert sato_image(op(f"d^{n}")) == z(-n)
        assert sato_image(op(f"x^{n}*d^{n}")) == TruncatedLaurent.from_dict({0: (-1) ** n * math.factorial(n)}, 8)
    P = op("x*d^2 + d^-1 + x^3*d")
    assert sato_image(P.compose(PsiDO.x(1, P.ring))).is_zero()


def test_sato_lift_examples():
    assert sato_lift(z(2)) == PsiDO.d(-2, SeriesRing(8), depth=12)
    assert sato_lift(TruncatedLaurent.zero(6)).is_zero()


def test_action_examples():
    v = parse_laurent("z^-1 + 2 + z^3")
    assert act_on_v(op("1", depth=12), v) == v
    for n in range(-3, 4):
        assert act_on_v(op("d", depth=12), z(n)) == z(n - 1)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_associativity(seed):
    rng = random.Random(seed)
    P, Q, R = (operator(rng, rng.randint(-1, 2), 6, 8, terms=3) for _ in range(3))
    assert P.compose(Q).compose(R) == P.compose(Q.compose(R))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_depth_recompute_agrees(seed):
    rng = random.Random(seed)
    P = operator(rng, 2, 10, 8, terms=3)
    Q = operator(rng, 1, 10, 8, terms=3)
    low = P.truncate_depth(5).compose(Q.truncate_depth(5))
    assert P.compose(Q) == low
    assert low.depth <= 5


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_split_projections(seed):
    P = operator(random.Random(seed), 2, 5, 6, terms=3)
    assert P.plus() + P.minus() == P
    assert P.plus().plus() == P.plus()
    assert P.minus().minus() == P.minus()
    assert P.plus().minus().is_zero()


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_subrings_closed(seed):
    rng = random.Random(seed)
    A, B = differential_operator(rng, 2), differential_operator(rng, 2)
    assert all(e >= 0 for e in A.compose(B).terms)
    C, D = operator(rng, -1, 5, 6), operator(rng, -1, 5, 6)
    assert all(e < 0 for e in C.compose(D).terms)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_unitriangular_inverse_round_trip(seed):
    S = dressing_operator(random.Random(seed), 5, 8)
    assert S.inverse().inverse() == S
    assert S.compose(S.inverse()) == op("1", depth=5)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_sato_image_closed_form_matches_rewriting(seed):
    P = operator(random.Random(seed), 3, 4, 6, terms=4)
    assert sato_image(P) == sato_image_by_rewriting(P)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_sato_image_kills_ex_and_is_linear(seed):
    rng = random.Random(seed)
    P, Q = operator(rng, 2, 5, 8, terms=3), operator(rng, 2, 5, 8, terms=3)
    x = PsiDO.x(1, P.ring)
    assert sato_image(P.compose(Q).compose(x)).is_zero()
    assert sato_image(P + Q) == sato_image(P) + sato_image(Q)


@given(st.lists(st.builds(Fraction, st.integers(-5, 5), st.integers(1, 3)), max_size=8), st.integers(-3, 2))
def test_lift_round_trip(coeffs, start):
    v = TruncatedLaurent(start, coeffs, 9)
    assert sato_image(sato_lift(v)) == v


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_action_is_linear(seed):
    rng = random.Random(seed)
    P = operator(rng, 1, 6, 8, terms=3)
    v = TruncatedLaurent.from_dict({e: rng.randint(-3, 3) for e in range(-2, 4)}, 10)
    w = TruncatedLaurent.from_dict({e: rng.randint(-3, 3) for e in range(-2, 4)}, 10)
    a, b = act_on_v(P, v), act_on_v(P, w)
    n = min(a.order, b.order)
    assert act_on_v(P, v + w) == a.truncate(n) + b.truncate(n)
    assert act_on_v(P, 3 * v) == 3 * act_on_v(P, v)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_stabilizer_of_w0(seed):
    rng = random.Random(seed)
    D = differential_operator(rng, 3)
    assert w0_violation(D, 6) is None
    P = D + PsiDO({-1: series(rng, 12, terms=3)}, 4, SeriesRing(12))
    if not P.minus().is_zero():
        assert w0_violation(P, 10) is not None


@settings(max_examples=30)
@given(seeds)
def test_operator_round_trip(seed):
    P = operator(random.Random(seed), 2, 3, 6, terms=3)
    assert parse_operator(str(P), depth=3, x_order=6) == P


def test_symbolic_ring_round_trip():
    L = LaxOperator.symbolic(3).operator().power(2)
    assert parse_operator(str(L), depth=3, ring=POLY) == L
