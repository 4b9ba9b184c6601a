from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from kpsato.errors import ConfigurationError, NotFredholmError
from kpsato.localfield import (REGIONS, TABLE, ExponentSet, GradedIndexSpec, HalfPlane,
                               MonomialRegion, TwoVarSeries, check_intersections, check_table,
                               check_graded_indices, filtration_region, generated_support,
                               graded_index, graded_piece, parse_two_var, presentation,
                               region_for, three_term_cohomology)

WINDOW = 12
box = range(-WINDOW, WINDOW + 1)


def brute_region(name):
    # membership rules written out by hand, one per ring
    rules = {
        "B_P": lambda i, j: i >= 0,
        "B_C": lambda i, j: i + j <= 0,
        "O_PC": lambda i, j: j >= 0,
        "A": lambda i, j: i >= 0 and i + j <= 0,
        "A_C": lambda i, j: i + j <= 0 and j >= 0,
        "O_P": lambda i, j: i >= 0 and j >= 0,
    }
    return {(i, j) for i in box for j in box if rules[name](i, j)}


@pytest.mark.parametrize("name", sorted(TABLE))
def test_regions_match_rules(name):
    assert region_for(name).points(WINDOW) == brute_region(name)


@pytest.mark.parametrize("name", sorted(TABLE))
def test_regions_match_generated_rings(name):
    support = generated_support(presentation(TABLE[name]), WINDOW)
    assert {p for p in support if max(map(abs, p)) <= WINDOW} == brute_region(name)


def test_membership_examples():
    B_C = region_for("B_C")
    assert B_C.contains(-2, 1)
    assert not B_C.contains(1, 1)
    A = region_for("A")
    for a in range(4):
        for b in range(4):
            assert A.contains(a, -a - b)
    assert region_for("B_P").contains(0, -7)
    assert not region_for("B_P").contains(-1, 5)


def test_aliases_and_unknown_names():
    assert region_for("Ô_{P,C}") is region_for("O_PC")
    assert region_for("K02") is region_for("B_P")
    with pytest.raises(ConfigurationError):
        region_for("B_Q")


def test_intersections():
    r = REGIONS
    assert r["B_P"].intersect(r["B_C"]).same_on(r["A"], 20) == []
    assert r["B_C"].intersect(r["O_PC"]).same_on(r["A_C"], 20) == []
    assert r["B_P"].intersect(r["O_PC"]).same_on(r["O_P"], 20) == []
    assert r["A"].intersect(filtration_region(0)).same_on(r["A_C"].intersect(r["B_P"]), 20) == []
    for name in TABLE:
        assert r[name].intersect(r[name]).same_on(r[name], 10) == []


def test_regions_are_closed_under_addition():
    for name in TABLE:
        assert REGIONS[name].additive_failures(8) == []


def test_union_and_half_planes():
    left = MonomialRegion.of(HalfPlane(-1, 0, 1))
    right = MonomialRegion.of(HalfPlane(1, 0, 1))
    both = left.union(right)
    assert both.contains(-1, 0) and both.contains(1, 0) and not both.contains(0, 0)
    assert both.slice(0) == ExponentSet.of([(None, -1), (1, None)])


def test_intersection_and_table_reports():
    assert check_intersections(20).ok
    assert check_table(20).ok


def test_graded_pieces():
    for n in range(-3, 4):
        assert REGIONS["B_P"].slice(n).is_power_series()
        assert REGIONS["B_C"].slice(n) == ExponentSet.of([(None, -n)])
    W = graded_piece(REGIONS["B_C"], 0)
    assert W.index() == 1
    assert W.in_big_cell()


def test_graded_index_values():
    values = [graded_index(REGIONS["B_C"], n) for n in range(-5, 6)]
    assert values == [1 - n for n in range(-5, 6)]


def test_degenerate_piece():
    with pytest.raises(NotFredholmError):
        graded_piece(REGIONS["O_PC"], -1)
    with pytest.raises(NotFredholmError):
        graded_index(REGIONS["O_PC"], -2)


def test_graded_index_report():
    rep = check_graded_indices(GradedIndexSpec(chi=1, self_intersection=1))
    assert rep.ok
    assert rep.data["slope"] == -1
    assert not check_graded_indices(GradedIndexSpec(chi=2, self_intersection=1)).ok


def test_three_term_complex():
    h, witnesses = three_term_cohomology(REGIONS["B_C"], REGIONS["B_P"], REGIONS["O_PC"], 15)
    assert h == (1, 0, 0)
    assert witnesses[0] == [(0, 0)]


def test_three_term_detects_missing_coverage():
    # dropping B_C leaves the monomials with i < 0, j < 0 uncovered
    empty = MonomialRegion.of(HalfPlane(0, 0, 1))
    h, _ = three_term_cohomology(empty, REGIONS["B_P"], REGIONS["O_PC"], 3)
    assert h[2] == 9


def test_two_variable_arithmetic():
    orders = (10, 10)
    t = TwoVarSeries.monomial(0, 1, orders)
    t_inv = TwoVarSeries.monomial(0, -1, orders)
    assert t_inv * t == TwoVarSeries.constant(1, orders)
    x = parse_two_var("u^-1*t")
    square = x * x
    assert square.t_order == 13  # a factor of t-valuation 1 raises the precision
    a, b = square.aligned_with(x)
    cube = a * b
    assert cube.support() == [(-3, 3)]
    assert cube.in_region(REGIONS["B_C"])
    assert not parse_two_var("u*t").in_region(REGIONS["B_C"])


def test_truncation_mismatch():
    with pytest.raises(ConfigurationError):
        TwoVarSeries.monomial(0, 1, (6, 6)) + TwoVarSeries.monomial(0, 1, (6, 7))


def random_two_var(rng, lowest):
    terms = {}
    for j in range(lowest, lowest + 3):
        for i in range(-2, 3):
            terms[(i, j)] = rng.randint(-2, 2)
    out = TwoVarSeries({}, 10)
    for (i, j), c in terms.items():
        out = out + TwoVarSeries.monomial(i, j, (10, 10), c)
    return out


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.integers(-3, 3), st.integers(-3, 3))
def test_filtration_is_multiplicative(seed, n, m):
    rng = random.Random(seed)
    a, b = random_two_var(rng, n), random_two_var(rng, m)
    assert a.in_region(filtration_region(n))
    assert (a * b).in_region(filtration_region(n + m))


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_two_variable_round_trip(seed):
    a = random_two_var(random.Random(seed), -1)
    assert parse_two_var(str(a), (10, 10)) == a
