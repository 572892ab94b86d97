import pytest
from hypothesis import given
from hypothesis import strategies as st

from anderson_forge.algebra import AlgCoeff, AlgFrac
from anderson_forge.drinfeld import DrinfeldModule, exp_phi
from anderson_forge.errors import ParseError, PrecisionExhausted
from anderson_forge.ff import FieldParams
from anderson_forge.laurent import LaurentApprox, embed
from anderson_forge.tate import (
    TateSeries,
    carlitz_period,
    geometric_inverse,
    hyperderivative,
    omega_series,
    tate_eval,
)


def tpoly(F, coeffs):
    return TateSeries(F, [AlgFrac.of(AlgCoeff.const(F, c), F) for c in coeffs])


@pytest.mark.parametrize("q,s", [(2, 0), (2, 2), (3, 1), (4, 0)])
def test_omega_functional_equation(q, s):
    F = FieldParams.from_q(q, s=s, prec=150)
    D = 20
    om = omega_series(F, D)
    rhs = TateSeries(F, [-(AlgFrac.theta(F) ** q), AlgFrac.one(F)]) * om.twist(1)
    worst, floor = om.violation_ord(rhs, D)
    assert worst >= floor >= 150


@pytest.mark.parametrize("q,s", [(2, 0), (2, 1), (3, 2)])
def test_omega_constant_term_order(q, s):
    F = FieldParams.from_q(q, s=s, prec=80)
    # the prefactor (-theta)^(-q/(q-1)) is v^(q^(s+1)); the product is a unit
    assert omega_series(F, 0).coeffs[0].valuation() == q ** (s + 1)


def test_omega_degree_zero_truncation():
    F = FieldParams.from_q(2, s=1, prec=60)
    om = omega_series(F, 0)
    assert om.trunc == 0 and len(om.coeffs) == 1


@pytest.mark.parametrize("q,s", [(2, 0), (2, 3), (3, 1), (5, 0)])
def test_carlitz_period(q, s):
    F = FieldParams.from_q(q, s=s, prec=120)
    pi = carlitz_period(F)
    assert pi.valuation() == -(q ** (s + 1))
    assert exp_phi(DrinfeldModule.carlitz(F), pi).is_zero()
    prod = pi * tate_eval(omega_series(F, 48), LaurentApprox.theta(F))
    assert (prod + 1).is_zero()


def test_hyperderivative_examples():
    F = FieldParams.from_q(2)
    t3 = tpoly(F, [0, 0, 0, 1])
    assert hyperderivative(t3, 1) == tpoly(F, [0, 0, 1])  # 3 = 1 mod 2
    F3 = FieldParams.from_q(3)
    assert hyperderivative(tpoly(F3, [0, 0, 1]), 2) == tpoly(F3, [1])
    assert hyperderivative(tpoly(F3, [0, 0, 1]), 1) == tpoly(F3, [0, 2])


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hyperderivatives_of_t_minus_theta_at_theta(q, n):
    F = FieldParams.from_q(q, prec=40)
    f = TateSeries.t_minus_theta(F)
    fn = TateSeries.const(F, AlgFrac.one(F))
    for _ in range(n):
        fn = fn * f
    th = LaurentApprox.theta(F)
    for j in range(n + 1):
        val = tate_eval(hyperderivative(fn, j), th)
        expected = 1 if j == n else 0
        assert (val - expected).is_zero()


@given(st.lists(st.integers(0, 2), min_size=1, max_size=8), st.lists(st.integers(0, 2), min_size=1, max_size=8),
       st.integers(0, 5))
def test_hyperderivative_leibniz(a, b, j):
    F = FieldParams.from_q(3)
    f, g = tpoly(F, a), tpoly(F, b)
    lhs = hyperderivative(f * g, j)
    rhs = TateSeries.zero(F)
    for i in range(j + 1):
        rhs = rhs + hyperderivative(f, i) * hyperderivative(g, j - i)
    assert (lhs - rhs).is_zero()


def test_tate_eval_constant_and_geometric_series():
    F = FieldParams.from_q(2, s=1, prec=80)
    c = embed(AlgFrac.theta(F) + 1, F)
    xi = LaurentApprox.monomial(F, 5)
    assert (tate_eval(TateSeries.const(F, c), xi) - c).is_zero()
    g = geometric_inverse(F, AlgFrac.theta(F), 40)  # 1/(theta - t)
    at0 = tate_eval(g, LaurentApprox.zero(F))
    assert (at0 - embed(AlgFrac.theta(F).inverse(), F)).is_zero()
    # (theta - t) * g = 1 exactly up to the truncation degree
    prod = TateSeries(F, [AlgFrac.theta(F), -AlgFrac.one(F)]) * g
    assert prod.coeffs[0] == AlgFrac.one(F)
    assert all(x.is_zero() for x in prod.coeffs[1:])


def test_series_inverse():
    F = FieldParams.from_q(2, s=0, prec=80)
    f = TateSeries(F, [AlgFrac.theta(F), AlgFrac.one(F)]).to_approx()
    inv = f.inverse(12)
    prod = (f * inv).truncate(12)
    assert (prod.coeffs[0] - 1).is_zero() and all(x.is_zero() for x in prod.coeffs[1:])


def test_truncation_and_json():
    F = FieldParams.from_q(2, s=1, prec=60)
    om = omega_series(F, 6)
    worst, floor = TateSeries.from_json(om.to_json(), F).violation_ord(om)
    assert worst >= floor
    with pytest.raises(PrecisionExhausted):
        om.truncate(7)
    exact = tpoly(F, [1, 0, 1])
    assert TateSeries.from_json(exact.to_json(), F) == exact
    with pytest.raises(ParseError):
        TateSeries.from_json({"kind": "bogus", "coeffs": []}, F)
