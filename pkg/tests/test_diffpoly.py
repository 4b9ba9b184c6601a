from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kpsato.diffpoly import DiffPoly, DiffVar, u
from kpsato.errors import ConfigurationError

from strategies import rationals

variables = st.builds(lambda m, k: u(m, k), st.integers(1, 3), st.integers(0, 3))
monomials = st.tuples(rationals, st.lists(variables, max_size=3))


def _build(terms):
    p = DiffPoly.zero()
    for c, vs in terms:
        m = DiffPoly.constant(c)
        for v in vs:
            m = m * v
        p = p + m
    return p


polys = st.lists(monomials, max_size=4).map(_build)


def test_total_derivative_examples():
    assert u(1).deriv() == u(1, 1)
    assert (u(1) * u(1)).deriv() == 2 * u(1) * u(1, 1)
    assert (u(1) * u(2, 1)).deriv() == u(1, 1) * u(2, 1) + u(1) * u(2, 2)


def test_substitution_examples():
    bind = {DiffVar(2): DiffPoly.parse("-1/2*u1'")}
    assert (2 * u(2) + u(1, 1)).substitute(bind).is_zero()
    assert u(2, 1).substitute(bind) == Fraction(-1, 2) * u(1, 2)
    p = DiffPoly.parse("u1*u2' + 3")
    assert p.substitute({DiffVar(1): u(1), DiffVar(2): u(2)}) == p


def test_circular_binding_rejected():
    with pytest.raises(ConfigurationError):
        u(1).substitute({DiffVar(1): u(2), DiffVar(2): u(1)})


def test_printer_matches_notation():
    text = "u1''' + 3*u2'' + 3*u3' + 6*u1*u1'"
    assert str(DiffPoly.parse(text)) == text


def test_tagged_variables_parse():
    v = DiffVar.parse("u1_y''")
    assert v == DiffVar(1, 2, (2,))
    assert str(v) == "u1_y''"


@given(polys, polys)
def test_total_derivative_is_a_derivation(p, q):
    assert (p * q).deriv() == p.deriv() * q + p * q.deriv()


@given(polys)
def test_substitution_commutes_with_derivative(p):
    bind = {DiffVar(2): DiffPoly.parse("u1^2 - 1/2*u1'"), DiffVar(3): u(1, 2)}
    assert p.deriv().substitute(bind) == p.substitute(bind).deriv()


@given(polys, polys, polys)
def test_canonical_form(p, q, r):
    assert (p + q) * r == r * q + r * p
    assert str((p * q) * r) == str(p * (q * r))


@given(polys)
def test_round_trip(p):
    assert DiffPoly.parse(str(p)) == p
