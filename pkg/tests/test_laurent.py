import pytest
from hypothesis import given
from hypothesis import strategies as st

from anderson_forge.errors import DivisionByApparentZero, FieldError, NegativeTwistOnSeries
from anderson_forge.ff import FieldParams
from anderson_forge.laurent import INF, LaurentApprox

F2 = FieldParams.from_q(2, s=1, prec=64)
F9 = FieldParams.from_q(3, m=2, s=0, prec=48)


@st.composite
def series(draw, F=F2, lo=(-10, 10), n=24):
    low = draw(st.integers(*lo))
    codes = draw(st.lists(st.integers(0, F.gf.order - 1), min_size=1, max_size=n))
    prec = draw(st.integers(low + len(codes), low + len(codes) + 10))
    return LaurentApprox.from_codes(F, low, codes, prec=prec)


def unit_series(F=F2):
    return series(F).filter(lambda x: not x.is_zero())


def test_examples():
    F = F2
    th = LaurentApprox.theta(F)
    assert (th * th.inverse() - LaurentApprox.one(F)).is_zero()
    v = LaurentApprox.monomial(F, 1)
    assert (v + v).is_zero() and (v + v).prec == INF
    one_minus_v = LaurentApprox.one(F) - v
    g = LaurentApprox.one(F).div(one_minus_v, prec=30)
    assert g.prec == 30 and g.codes() == [1] * 30  # 1 + v + v^2 + ...
    assert (g * one_minus_v).agrees(LaurentApprox.one(F))
    assert v.twist(1) == LaurentApprox.monomial(F, 2)
    assert th.twist(1).agrees(th * th)
    # freshman's dream over F_2: (1+v)^(q) = 1 + v^2
    assert (LaurentApprox.one(F) + v).twist(1) == LaurentApprox.one(F) + LaurentApprox.monomial(F, 2)


@given(series(), series(), series())
def test_ring_axioms_with_precision(a, b, c):
    assert ((a + b) + c).agrees(a + (b + c))
    assert ((a * b) * c).agrees(a * (b * c))
    assert (a * (b + c)).agrees(a * b + a * c)
    assert (a + b).prec == min(a.prec, b.prec)


@given(unit_series(), series())
def test_division_inverts_multiplication(a, b):
    x = b.div(a)
    assert (x * a).agrees(b)


@given(series(F9), series(F9))
def test_twist_is_ring_endomorphism_over_f9(a, b):
    assert (a * b).twist(1).agrees(a.twist(1) * b.twist(1))
    assert (a + b).twist(1).agrees(a.twist(1) + b.twist(1))
    assert a.twist(2).agrees(a ** 9) if a.valuation() >= 0 else True


@given(series())
def test_precision_scales_under_twist(a):
    t = a.twist(1)
    assert t.prec == a.prec * 2
    if not a.is_zero():
        assert t.valuation() == 2 * a.valuation()


@given(series())
def test_json_roundtrip(a):
    assert LaurentApprox.from_json(a.to_json(), F2) == a


def test_errors():
    with pytest.raises(DivisionByApparentZero):
        LaurentApprox.zero(F2, 10).inverse()
    with pytest.raises(NegativeTwistOnSeries):
        LaurentApprox.one(F2).twist(-1)
    with pytest.raises(FieldError):
        LaurentApprox.one(F2) + LaurentApprox.one(F9)


def test_zero_with_precision_is_not_exact():
    z = LaurentApprox.from_codes(F2, 3, [0, 0, 0], prec=6)
    assert z.is_zero() and z.prec == 6 and not z.is_exact()
