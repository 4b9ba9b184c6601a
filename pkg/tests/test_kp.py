from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kpsato.diffpoly import DiffPoly, DiffVar, u
from kpsato.errors import TruncationBudgetError
from kpsato.kp import (PRINTED_KDV, LaxOperator, constraint_residuals, derive_kdv, derive_kp,
                       evolution_equations, flow_jet, invariant_submanifold_check, kdv_constraint,
                       kdv_equation, kp_field, mixed_derivatives, numeric_kp_field, stated_eq4,
                       symbolic_flows_commute)
from kpsato.sampling import series
from kpsato.series import TruncatedSeries

P = DiffPoly.parse


def rhs(n, m, depth=5):
    return evolution_equations(LaxOperator.symbolic(depth), n)[m - 1].rhs


def test_first_flow_is_translation():
    field = kp_field(LaxOperator.symbolic(5), 1)
    for m in range(1, 5):
        assert field.coeff(-m) == u(m, 1)


def test_second_and_third_flows():
    assert rhs(2, 1) == P("u1'' + 2*u2'")
    assert rhs(2, 2) == P("u2'' + 2*u3' + 2*u1*u1'")
    assert rhs(3, 1) == P("u1''' + 3*u2'' + 3*u3' + 6*u1*u1'")
    assert rhs(1, 3) == u(3, 1)


def test_fields_have_only_negative_exponents():
    for n in range(1, 4):
        assert all(e < 0 for e in kp_field(LaxOperator.symbolic(6), n).terms)


def test_budget_errors_name_the_required_depth():
    with pytest.raises(TruncationBudgetError) as info:
        evolution_equations(LaxOperator.symbolic(4), 3, 2)
    assert info.value.required == 5


def test_equation_records():
    eq = evolution_equations(LaxOperator.symbolic(4), 2, 1)[0]
    assert eq.time_index == 2
    assert eq.target == DiffVar(1)


def test_kp_derivation():
    rep = derive_kp()
    assert rep.ok
    assert rep.steps[-1].text == "residual = 0"


def test_stated_intermediate_equation_holds():
    # 2u_t - 2u''' - 6uu' = 3(u2'' + u2_y) after resolving the time tags
    from kpsato.kp import hierarchy_flows
    flows = hierarchy_flows(5, (2, 3))
    assert stated_eq4().resolve_tags(flows).is_zero()


def test_constraint_recursion():
    sol = kdv_constraint(5)
    assert sol.bindings[2] == P("-1/2*u1'")
    assert sol.bindings[3] == P("-1/2*u1^2 + 1/4*u1''")
    assert all(r.is_zero() for r in constraint_residuals(sol, 5))


def test_kdv_derivation_and_discrepancy():
    rep = derive_kdv()
    assert rep.ok
    eq = kdv_equation()
    assert 4 * eq.rhs == P("u1''' + 12*u1*u1'")
    assert rep.data["printed"] == PRINTED_KDV
    assert rep.data["discrepancy"] == "-6*u1'''"
    assert rep.data["sign_slip_reproduces_printed"] is True


def test_locus_is_invariant():
    checks = invariant_submanifold_check(6)
    assert checks
    assert all(p.is_zero() for _, p in checks)


def test_symbolic_flows_commute():
    out = symbolic_flows_commute(7, 2, 3)
    assert out
    assert all(p.is_zero() for _, p in out)


def lax_from_seed(seed, depth=4, order=10):
    rng = random.Random(seed)
    return LaxOperator.from_series([series(rng, order, terms=3) for _ in range(depth)])


def test_first_order_jet_is_euler_step():
    L0 = lax_from_seed(7, depth=5)
    jet = flow_jet(L0, 2, 1)
    field = numeric_kp_field(L0, 2)
    for m, c in jet.coefficients[1].items():
        assert c == field.coeff(-m)
    for m, c in jet.coefficients[0].items():
        assert c == L0.coefficients[m - 1]


def test_stationary_point():
    consts = [TruncatedSeries.constant(Fraction(m, 3), 8) for m in range(1, 5)]
    jet = flow_jet(LaxOperator.from_series(consts), 1, 2)
    for row in jet.coefficients[1:]:
        assert all(c.is_zero() for c in row.values())


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_mixed_jets_agree(seed):
    ab, ba = mixed_derivatives(lax_from_seed(seed, depth=6), 2, 3)
    assert ab
    for m in ab:
        assert ab[m] == ba[m]
