from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from kpsato.errors import ConfigurationError, TruncationBudgetError
from kpsato.grassmann import GrassmannPoint
from kpsato.krichever import (EXAMPLES, check_curve, cohomology, curve_from_json, derivative_at,
                              evaluation, example, filtration_profile, index_from_levels,
                              polynomial_subspace, same_span, stabilizer_algebra,
                              verify_ring_closure)
from kpsato.sampling import big_cell_point

GENUS = {"projective-line": 0, "cuspidal-cubic": 1, "nodal-cubic": 1, "nodal-twisted": 1}


def poly_value(v, s):
    # elements of A are polynomials in s = z^-1
    assert all(e <= 0 for e, _ in v.items())
    return sum(c * Fraction(s) ** (-e) for e, c in v.items())


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_ring_closure(name):
    rep = verify_ring_closure(example(name), 20)
    assert rep.ok


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_cohomology_and_index(name):
    c = example(name)
    h0, h1 = cohomology(c.A)
    assert (h0, h1) == (1, GENUS[name])
    assert c.A.index() == h0 - h1 == index_from_levels(c.A)


def test_module_cohomology():
    assert cohomology(example("nodal-twisted").W) == (0, 0)
    assert cohomology(example("nodal-cubic").W) == (1, 1)


def test_cuspidal_basis_has_no_simple_pole():
    A = example("cuspidal-cubic").a_basis(10)
    assert all(v.coeff(-1) == 0 for v in A)
    assert sorted(-v.valuation() for v in A) == [0, 2, 3, 4, 5, 6, 7, 8, 9, 10]


def test_nodal_products_satisfy_the_condition():
    A = example("nodal-cubic").a_basis(8)
    for a in A:
        assert poly_value(a, 1) == poly_value(a, -1)
        for b in A:
            p = a * b
            assert poly_value(p, 1) == poly_value(p, -1)


def test_fractional_ideal_condition():
    W = example("nodal-twisted").w_basis(8)
    for w in W:
        assert poly_value(w, 1) == 2 * poly_value(w, -1)


def test_filtration_profiles():
    line = filtration_profile(example("projective-line"), 10)
    assert all(g == 1 for n, g in line.graded().items() if n <= -1)
    assert line.gaps() == []
    cusp = filtration_profile(example("cuspidal-cubic"), 10)
    assert cusp.gaps() == [1]
    for name in EXAMPLES:
        p = filtration_profile(example(name), 10)
        assert p.dims[1] == 0
        assert all(p.dims[n] >= p.dims[n + 1] for n in range(-10, 1))


def test_stabilizer_of_w0_is_polynomial():
    stab = stabilizer_algebra(GrassmannPoint.standard(order=40), 6)
    assert sorted(v.valuation() for v in stab) == [-6, -5, -4, -3, -2, -1, 0]


def test_stabilizer_of_generic_point_is_constant():
    W = big_cell_point(random.Random(2), size=3, order=40, span=30)
    stab = stabilizer_algebra(W, 5)
    assert len(stab) == 1
    assert stab[0].items() == [(0, 1)]


def test_stabilizer_recovers_cuspidal_ring():
    c = example("cuspidal-cubic")
    stab = stabilizer_algebra(c.W, 8)
    assert same_span(stab, c.a_basis(8), -8, 0)
    assert len(stab) == len(c.a_basis(8))


def test_stabilizer_needs_precision():
    with pytest.raises(TruncationBudgetError):
        stabilizer_algebra(GrassmannPoint.standard(order=12), 10)


def test_closure_needs_precision():
    with pytest.raises(TruncationBudgetError):
        verify_ring_closure(example("cuspidal-cubic", order=20), 20)


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_full_check(name):
    assert check_curve(example(name), 20).ok


def test_functionals():
    assert derivative_at(2, 1)(3) == 12
    assert derivative_at(0, 1)(1) == 1
    assert evaluation((1, 1), (-1, -1))(2) == 0
    assert evaluation((1, 1), (-1, -1))(3) == 2


def test_polynomial_subspace_with_no_conditions_is_w0():
    assert polynomial_subspace([], 30) == GrassmannPoint.standard(order=30)


def test_user_curve_data():
    text = json.dumps({"name": "cusp", "A": {"conditions": [{"derivative": [0, 1]}]}, "genus": 1})
    c = curve_from_json(text)
    assert c.A == example("cuspidal-cubic").A
    assert check_curve(c, 12).ok
    node = json.dumps({"A": {"conditions": [{"eval": [[1, 1], [-1, -1]]}]}, "genus": 1})
    assert cohomology(curve_from_json(node).A) == (1, 1)
    line = curve_from_json(json.dumps({"A": "span{} tail at 0", "genus": 0}))
    assert cohomology(line.A) == (1, 0)


def test_user_curve_data_errors():
    with pytest.raises(ConfigurationError):
        curve_from_json(json.dumps({"A": "span{} tail at 0"}))
    with pytest.raises(ConfigurationError):
        curve_from_json(json.dumps({"A": 3, "genus": 0}))
