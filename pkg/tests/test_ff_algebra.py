import pytest
from hypothesis import given
from hypothesis import strategies as st

from anderson_forge.algebra import AlgCoeff, AlgFrac
from anderson_forge.errors import FieldError, InverseTwistUndefined
from anderson_forge.ff import FieldParams, get_gf
from anderson_forge.laurent import LaurentApprox, alg_embed, embed

FIELDS = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (5, 1)]


@pytest.mark.parametrize("q,m", FIELDS)
def test_gf_axioms_exhaustive(q, m):
    F = FieldParams.from_q(q, m=m)
    G = F.gf
    elems = range(G.order)
    assert G.order == q**m
    for a in elems:
        assert G.add(a, G.neg(a)) == 0
        assert G.mul(a, 1) == a
        if a:
            assert G.mul(a, G.inv(a)) == 1
            assert G.pow(a, G.order - 1) == 1


@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
def test_gf_distributive_f81(a, b, c):
    G = get_gf(3, 4)
    assert G.mul(a, G.add(b, c)) == G.add(G.mul(a, b), G.mul(a, c))
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))


@pytest.mark.parametrize("q,m", FIELDS)
def test_frobenius_has_order_m(q, m):
    F = FieldParams.from_q(q, m=m)
    for c in range(F.gf.order):
        assert F.twist_scalar(c, m) == c
        assert F.twist_scalar(F.twist_scalar(c, 1), -1) == c
        assert F.twist_scalar(c, 1) == F.gf.pow(c, q)


def test_fq_elements_are_frobenius_fixed():
    F = FieldParams.from_q(2, m=4)
    fixed = [c for c in range(F.gf.order) if F.twist_scalar(c, 1) == c]
    assert sorted(F.fq_elements()) == fixed and len(fixed) == 2


def test_field_params_validation():
    with pytest.raises(FieldError):
        FieldParams(p=2, q=6)
    with pytest.raises(FieldError):
        FieldParams.from_q(6)
    with pytest.raises(FieldError):
        FieldParams.from_q(2, m=0)
    with pytest.raises(FieldError):
        FieldParams.from_q(2, s=-1)


@pytest.mark.parametrize("q,m,s", [(2, 1, 0), (2, 1, 3), (3, 2, 1), (4, 1, 2)])
def test_uniformizer_exponent(q, m, s):
    F = FieldParams.from_q(q, m=m, s=s)
    assert F.E == (q**m - 1) * q**s
    assert F.wstep * F.wdeg == F.E


# ---------------------------------------------------------------- AlgCoeff

F3 = FieldParams.from_q(2, m=2, s=2, prec=80)


@st.composite
def alg(draw, F=F3, max_deg=12):
    terms = draw(st.lists(st.tuples(st.integers(0, max_deg), st.integers(0, F.gf.order - 1)), max_size=5))
    return AlgCoeff.from_terms(F, terms)


@given(alg(), alg(), alg())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == AlgCoeff.zero(F3)
    assert a * AlgCoeff.one(F3) == a


@given(alg(), alg())
def test_twist_is_ring_endomorphism(a, b):
    assert (a * b).twist(1) == a.twist(1) * b.twist(1)
    assert (a + b).twist(1) == a.twist(1) + b.twist(1)
    assert a.twist(1).twist(-1) == a


@given(alg(), alg())
def test_divmod(a, b):
    if b.is_zero():
        return
    qt, r = a.divmod(b)
    assert qt * b + r == a
    assert r.is_zero() or r.degree < b.degree


def test_twist_examples():
    F = FieldParams.from_q(2, s=2)
    th = AlgCoeff.theta(F)
    assert th.twist(1) == th**2
    assert th.twist(-1) == AlgCoeff.w(F, 2)  # theta^(1/2) = w^(q^(s-1))
    assert AlgCoeff.w(F) ** (F.q**F.s) == th
    # oracle: squaring undoes the inverse twist over F_2
    x = (th + AlgCoeff.one(F)).twist(-1)
    assert x**2 == th + AlgCoeff.one(F)
    assert x == AlgCoeff.w(F, 2) + AlgCoeff.one(F)


def test_inverse_twist_beyond_roots_raises():
    F = FieldParams.from_q(2, s=1)
    th = AlgCoeff.theta(F)
    th.twist(-1)
    with pytest.raises(InverseTwistUndefined):
        th.twist(-2)


def test_constants_twist_even_without_roots():
    F = FieldParams.from_q(2, m=2, s=0)
    c = AlgCoeff.const(F, 2)
    assert c.twist(-5).twist(5) == c


@given(alg())
def test_algcoeff_json_roundtrip(a):
    assert AlgCoeff.from_json(a.to_json(), F3) == a


# ---------------------------------------------------------------- AlgFrac


@given(alg(), alg(), alg())
def test_fraction_field(a, b, c):
    if b.is_zero() or c.is_zero():
        return
    x, y = AlgFrac(a, b), AlgFrac(c, b * c)
    assert x * y.inverse() * y == x
    assert (x + y) - y == x
    assert (x / y) * y == x
    assert AlgFrac.from_json(x.to_json(), F3) == x
    assert (x * y).twist(1) == x.twist(1) * y.twist(1)


def test_algfrac_normalizes():
    F = FieldParams.from_q(3)
    th = AlgCoeff.theta(F)
    x = AlgFrac(th * th - AlgCoeff.one(F), th - AlgCoeff.one(F))
    assert x.is_poly() and x == AlgFrac.of(th + AlgCoeff.one(F), F)
    with pytest.raises(ZeroDivisionError):
        AlgFrac.zero(F).inverse()


# ---------------------------------------------------------------- embedding


@pytest.mark.parametrize("q,m,s", [(2, 1, 0), (2, 1, 2), (3, 1, 1), (2, 2, 1)])
def test_embed_theta_and_zeta(q, m, s):
    F = FieldParams.from_q(q, m=m, s=s, prec=60)
    th = alg_embed(AlgCoeff.theta(F), 60)
    assert th.valuation() == -F.E and th.agrees(LaurentApprox.theta(F))
    assert (th + LaurentApprox.monomial(F, -F.E)).is_zero()  # theta = -v^(-E)
    assert alg_embed(AlgCoeff.one(F), 60).agrees(LaurentApprox.one(F))
    z = LaurentApprox.zeta(F)
    assert z.valuation() == -F.zdeg
    assert (z ** (q - 1) + th).is_zero()  # zeta^(q-1) = -theta


@given(alg(max_deg=6), alg(max_deg=6))
def test_embedding_is_a_homomorphism(a, b):
    ea, eb = alg_embed(a, 120), alg_embed(b, 120)
    assert alg_embed(a * b, 120).agrees(ea * eb)
    assert alg_embed(a + b, 120).agrees(ea + eb)
    assert alg_embed(a.twist(1), 400).agrees(ea.twist(1))


@given(alg(max_deg=6), alg(max_deg=6))
def test_embedding_of_fractions(a, b):
    if b.is_zero():
        return
    x = embed(AlgFrac(a, b), F3, 80)
    assert (x * alg_embed(b, 200)).agrees(alg_embed(a, 200))
