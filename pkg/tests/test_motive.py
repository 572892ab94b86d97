import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anderson_forge import matrix as M
from anderson_forge.algebra import AlgCoeff, AlgFrac
from anderson_forge.drinfeld import DrinfeldModule, cm_fixture
from anderson_forge.errors import OracleMismatch, ParameterMismatch, ParseError, RelationViolated
from anderson_forge.ff import FieldParams
from anderson_forge.laurent import LaurentApprox
from anderson_forge.motive import (
    GHPair,
    MotiveData,
    basis_change,
    build_extension_blocks,
    build_g_h,
    build_phi,
    build_psi,
    carlitz_motive,
    delta0_iota,
    det_factor,
    end_to_end_log_identity,
    en_normalizer,
    exterior_cofactor_check,
    g_at_theta,
    g_at_theta_closed_form,
    ladder_check,
    relation_report,
    verify_difference_eq,
)
from anderson_forge.suites import default_phi, random_phi
from anderson_forge.tate import TateSeries

F = FieldParams.from_q(2, s=3, prec=80)


def T(F, *coeffs):
    return TateSeries(F, [AlgFrac.of(c, F) for c in coeffs])


def t_minus_theta(F):
    return TateSeries.t_minus_theta(F)


@pytest.fixture(scope="module")
def cm():
    Fc = FieldParams.from_q(2, m=2, s=0, prec=120)
    return Fc, *cm_fixture(Fc)


def test_phi_of_carlitz_and_rank_two_determinant():
    mot = build_phi("Drinfeld", DrinfeldModule.carlitz(F))
    assert mot.Phi == [[t_minus_theta(F)]] and mot.det == (AlgFrac.one(F), 1)
    phi = default_phi(F, 2)
    d = M.det(build_phi("Drinfeld", phi).Phi, TateSeries.zero(F), TateSeries.const(F, AlgFrac.one(F)))
    a2 = AlgFrac.of(phi.a[1], F).twist(-2)
    assert (d - t_minus_theta(F).scale(-a2.inverse())).is_zero()


@pytest.mark.parametrize("r", [2, 3, 4])
def test_determinant_exponents_equal_dimensions(r):
    Fr = FieldParams.from_q(2, s=r, prec=60)
    phi = random_phi(Fr, r, random.Random(r))
    assert build_phi("Drinfeld", phi).det[1] == 1
    for n in (0, 1, 2):
        assert build_phi("En", phi, n).det[1] == r * n + r - 1
    for n in (1, 2):
        assert build_phi("Gn", phi, n).det[1] == r * n + 1


def test_det_factor_rejects_other_factors():
    with pytest.raises(RelationViolated):
        det_factor(F, T(F, AlgCoeff.one(F), AlgCoeff.one(F)))  # 1 + t
    with pytest.raises(RelationViolated):
        det_factor(F, TateSeries.zero(F))


def test_en_at_zero_is_the_cofactor():
    phi = default_phi(F, 3)
    P0 = build_phi("En", phi, 0).Phi
    P1 = build_phi("En", phi, 1).Phi
    assert M.equal(M.scale(P0, t_minus_theta(F)), P1)


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4]))
@settings(max_examples=10)
def test_exterior_power_oracle(seed, r):
    Fr = FieldParams.from_q(2, s=r, prec=40)
    phi = random_phi(Fr, r, random.Random(seed))
    assert exterior_cofactor_check(phi)


def test_exterior_power_sentinel():
    Fr = FieldParams.from_q(2, s=3, prec=40)
    phi = default_phi(Fr, 3)
    P0 = [row[:] for row in build_phi("En", phi, 0).Phi]
    P0[1][0] = P0[1][0] + TateSeries.const(Fr, AlgFrac.one(Fr))
    assert not exterior_cofactor_check(phi, P0)


@given(st.integers(0, 10**6), st.sampled_from([2, 3]), st.sampled_from([0, 1, 2]))
@settings(max_examples=10)
def test_conjugation(seed, r, n):
    Fr = FieldParams.from_q(3, s=r, prec=40)
    phi = random_phi(Fr, r, random.Random(seed))
    assert basis_change("En", phi, n).verified
    if n:
        assert basis_change("Gn", phi, n).verified


def test_normalizer_for_constant_leading_coefficient():
    Fq = FieldParams.from_q(3, s=2)
    phi = DrinfeldModule(Fq, (AlgCoeff.theta(Fq), AlgCoeff.const(Fq, 2)))
    assert en_normalizer(phi) == AlgFrac.of(AlgCoeff.const(Fq, 2), Fq) ** 2


def test_difference_equations(cm):
    Fc, phi, basis = cm
    for n in (1, 2):
        assert carlitz_motive(F, n, 16).report.passed
    mot = build_psi("Drinfeld", phi, basis, 0, 12)
    assert verify_difference_eq(mot.Phi, mot.Psi).passed
    for kind, n in (("En", 0), ("En", 1), ("Gn", 1)):
        mot = build_psi(kind, phi, basis, n, 12)
        assert verify_difference_eq(mot.Phi, mot.Psi).passed


def test_difference_equation_sentinel():
    mot = carlitz_motive(F, 1, 12)
    om = mot.Psi[0][0]
    bad = TateSeries(F, [om.coeffs[0] + LaurentApprox.monomial(F, 70)] + list(om.coeffs[1:]), om.trunc)
    rep = verify_difference_eq(mot.Phi, [[bad]])
    assert not rep.passed and rep.max_violation_order <= 70


def test_motive_json_roundtrip(cm):
    Fc, phi, basis = cm
    mot = build_psi("Gn", phi, basis, 1, 6)
    back = MotiveData.from_json(json.loads(json.dumps(mot.to_json())), Fc)
    assert back.kind == "Gn" and back.n == 1 and M.equal(back.Phi, mot.Phi)
    assert verify_difference_eq(back.Phi, back.Psi).passed
    with pytest.raises(ParseError):
        MotiveData.from_json({"kind": "Gn"}, Fc)


@pytest.mark.parametrize("flavor", ["En", "Gn"])
def test_gh_relation_and_zero_point(flavor):
    phi = default_phi(F, 2)
    d = 3
    th = AlgFrac.theta(F)
    pair = build_g_h(flavor, phi, 1, None, [th.inverse(), AlgFrac.zero(F), th.inverse() ** 2], 10)
    assert relation_report(pair).passed
    zero = build_g_h(flavor, phi, 1, None, [AlgFrac.zero(F)] * d, 10)
    assert all(h.is_zero() for h in zero.h)
    assert GHPair.from_json(pair.to_json()).D == 10


@pytest.mark.parametrize("flavor", ["En", "Gn"])
def test_g_at_theta_closed_form(flavor, cm):
    Fc, phi, _ = cm
    th = AlgFrac.theta(Fc)
    pair = build_g_h(flavor, phi, 1, None, [th.inverse(), AlgFrac.zero(Fc), th.inverse() ** 3], 24)
    for a, b in zip(g_at_theta(pair), g_at_theta_closed_form(pair)):
        assert a.agrees(b)


def test_delta0_iota_examples():
    phi = default_phi(F, 2)
    c = [AlgFrac.theta(F), AlgFrac.one(F)]
    out = delta0_iota([TateSeries.const(F, x) for x in c], "Gn", 2, phi)
    assert out == [AlgFrac.zero(F)] * 3 + c
    g = [TateSeries.t(F), TateSeries.zero(F)]
    assert len(delta0_iota(g, "Gn", 1, phi)) == 3
    rng = random.Random(4)
    for _ in range(5):
        g = [T(F, AlgCoeff.theta_poly(F, [rng.randrange(2), 1]), AlgCoeff.const(F, rng.randrange(2))) for _ in range(2)]
        delta0_iota(g, "En", 1, phi)


def test_delta0_iota_oracle_is_sensitive(monkeypatch):
    import anderson_forge.motive as mot

    phi = default_phi(F, 2)
    real = mot.sigma_oracle
    monkeypatch.setattr(mot, "sigma_oracle", lambda *a: [x + AlgFrac.one(F) for x in real(*a)])
    with pytest.raises(OracleMismatch):
        delta0_iota([TateSeries.t(F), TateSeries.zero(F)], "Gn", 1, phi)


@pytest.mark.parametrize("flavor,n", [("En", 1), ("Gn", 1), ("Gn", 2)])
def test_ladder(flavor, n):
    assert ladder_check(flavor, default_phi(F, 2), n)


@pytest.mark.parametrize("flavor", ["En", "Gn"])
def test_end_to_end(flavor, cm):
    Fc, phi, _ = cm
    th = AlgFrac.theta(Fc)
    z = AlgFrac.zero(Fc)
    rep = end_to_end_log_identity(flavor, phi, 1, [z, z, th.inverse()], 24)
    assert rep.passed and rep.floor >= 50
    rep0 = end_to_end_log_identity(flavor, phi, 1, [z, z, z], 8)
    assert rep0.passed and all(x.is_zero() for x in rep0.y + rep0.recovered)


def test_extension_blocks(cm):
    Fc, phi, basis = cm
    th = AlgFrac.theta(Fc)
    base = build_psi("Gn", phi, basis, 1, 16)
    z = AlgFrac.zero(Fc)
    p0 = build_g_h("Gn", phi, 1, None, [z, z, z], 16)
    X = build_extension_blocks([p0], base)
    assert X.size == 3 and X.report.passed
    assert all(x.is_zero() for x in X.Phi[-1][:-1])
    rng = random.Random(7)
    parts = [
        build_g_h("Gn", phi, 1, None, [AlgFrac.of(AlgCoeff.const(Fc, rng.randrange(4)), Fc) / th for _ in range(3)], 16)
        for _ in range(2)
    ]
    X2 = build_extension_blocks(parts, base)
    assert X2.size == 5 and X2.report.passed
    assert X2.det[1] == 2 * base.det[1]
    with pytest.raises(ParameterMismatch):
        build_extension_blocks([p0], build_psi("En", phi, basis, 1, 16))
