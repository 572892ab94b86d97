import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anderson_forge import matrix as M
from anderson_forge.algebra import AlgCoeff, AlgFrac
from anderson_forge.drinfeld import DrinfeldModule, agf_drinfeld, carlitz_polylog, exp_log_coeffs
from anderson_forge.errors import ParseError, UnsupportedRank
from anderson_forge.ff import FieldParams
from anderson_forge.laurent import LaurentApprox, alg_embed
from anderson_forge.suites import default_phi, random_phi, small_point
from anderson_forge.tate import TateSeries
from anderson_forge.tmodule import (
    TModuleDef,
    agf_tmodule,
    asp_top_coeff,
    build_dP,
    composition_defects,
    construct_tmodule,
    dP_commutes,
    evaluate_tmodule,
    exp_log_coeffs_matrix,
)

F = FieldParams.from_q(2, s=2, prec=100)


def test_dimensions():
    for r in (2, 3, 4):
        phi = default_phi(F, r)
        for n in (1, 2):
            assert construct_tmodule("Gn", phi, n).d == r * n + 1
            assert construct_tmodule("En", phi, n).d == r * n + r - 1
        assert construct_tmodule("En", phi, 0).d == r - 1
    for n in (1, 2, 3):
        assert construct_tmodule("CarlitzPower", None, n, F=F).d == n


def test_e0_of_rank_two_is_phi_itself():
    phi = default_phi(F, 2)
    G = construct_tmodule("En", phi, 0)
    T = G.phi_t()
    assert [c[0][0] for c in T.coeffs] == [AlgCoeff.theta(F), *phi.a]
    e = exp_log_coeffs(phi, 6, "exp")
    em = exp_log_coeffs_matrix(G, 6, "exp")
    assert all(a == b[0][0] for a, b in zip(e, em))


def test_carlitz_power_one_is_carlitz():
    G = construct_tmodule("CarlitzPower", None, 1, F=F)
    T = G.phi_t()
    assert T == DrinfeldModule.carlitz(F).phi_t()
    C = DrinfeldModule.carlitz(F)
    for which in ("exp", "log"):
        s = exp_log_coeffs(C, 6, which)
        mats = exp_log_coeffs_matrix(G, 6, which)
        assert all(a == b[0][0] for a, b in zip(s, mats))


@pytest.mark.parametrize("kind,r,n", [("En", 2, 1), ("Gn", 2, 1), ("En", 3, 0), ("Gn", 3, 2), ("CarlitzPower", 1, 3)])
def test_exp_log_matrices_are_inverse(kind, r, n):
    F0 = FieldParams.from_q(2, s=0)
    G = construct_tmodule(kind, None if kind == "CarlitzPower" else default_phi(F0, r), n, F=F0)
    N = 6
    a = exp_log_coeffs_matrix(G, N)
    b = exp_log_coeffs_matrix(G, N, "log", check=True)
    assert all(M.is_zero_matrix(x) for x in composition_defects(a, b, N)[1:])
    assert all(M.is_zero_matrix(x) for x in composition_defects(b, a, N)[1:])


@given(st.integers(0, 10**6), st.sampled_from(["En", "Gn", "CarlitzPower"]))
@settings(max_examples=8)
def test_exp_functional_equation(seed, kind):
    rng = random.Random(seed)
    F1 = FieldParams.from_q(2, s=1, prec=90)
    G = construct_tmodule(kind, None if kind == "CarlitzPower" else random_phi(F1, 2, rng), 1, F=F1)
    z = [small_point(F1, rng) for _ in range(G.d)]
    A0 = G.A(0)
    A0z = [sum((alg_embed(A0[i][j]) * z[j] for j in range(G.d)), LaurentApprox.zero(F1)) for i in range(G.d)]
    lhs = evaluate_tmodule(G, "exp", A0z)
    rhs = evaluate_tmodule(G, "action", evaluate_tmodule(G, "exp", z))
    assert all(a.agrees(b) for a, b in zip(lhs, rhs))
    assert all(x.is_zero() for x in evaluate_tmodule(G, "exp", [LaurentApprox.zero(F1)] * G.d))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_polylog_is_last_log_coordinate(n):
    G = construct_tmodule("CarlitzPower", None, n, F=F)
    a = alg_embed(AlgCoeff.theta(F)).inverse()
    y = evaluate_tmodule(G, "log", [LaurentApprox.zero(F)] * (n - 1) + [a])
    assert y[-1].agrees(carlitz_polylog(a, n))


def test_action_is_exact_on_algebraic_input():
    G = construct_tmodule("Gn", default_phi(F, 2), 1)
    x = [AlgCoeff.theta(F), AlgCoeff.one(F), AlgCoeff.zero(F)]
    out = evaluate_tmodule(G, "action", x)
    assert all(isinstance(v, AlgCoeff) for v in out)


def test_agf_tmodule():
    C1 = construct_tmodule("CarlitzPower", None, 1, F=F)
    w = small_point(F, random.Random(3), lowest=-F.E)
    (f,) = agf_tmodule(C1, [w], 10)
    g = agf_drinfeld(DrinfeldModule.carlitz(F), w, 10)
    assert all((a - b).is_zero() for a, b in zip(f.coeffs, g.coeffs))
    G = construct_tmodule("En", default_phi(F, 2), 1)
    zeros = agf_tmodule(G, [LaurentApprox.zero(F)] * G.d, 6)
    assert all(c.is_zero() for s in zeros for c in s.coeffs)


def test_almost_strict_purity():
    phi = default_phi(F, 2)
    for G in (construct_tmodule("En", phi, 0), construct_tmodule("En", phi, 1), construct_tmodule("Gn", phi, 1)):
        assert asp_top_coeff(G)[0]
    ok, top = asp_top_coeff(construct_tmodule("CarlitzPower", None, 2, F=F))
    assert ok and top[0][1].is_zero() and not top[0][0].is_zero() and not top[1][1].is_zero()


def test_dp_examples():
    phi = default_phi(F, 2)
    one = TateSeries.const(F, AlgFrac.one(F))
    zero = TateSeries.zero(F)
    Id = [[one, zero], [zero, one]]
    for flavor, n in (("En", 1), ("Gn", 1), ("Gn", 2)):
        dP = build_dP(Id, phi, n, flavor)
        d = len(dP)
        assert M.equal(dP, M.identity(d, AlgFrac.one(F), AlgFrac.zero(F)))
    t = TateSeries.t(F)
    G = construct_tmodule("Gn", phi, 1)
    dP = build_dP([[t, zero], [zero, t]], phi, 1, "Gn")
    assert dP_commutes(G, dP)
    # last row is [0, ..., 0, d eta] with d eta = theta for eta = phi(t)
    assert all(x.is_zero() for x in dP[-1][:-1]) and dP[-1][-1] == AlgFrac.theta(F)


def test_validation_and_json():
    phi = default_phi(F, 2)
    G = construct_tmodule("Gn", phi, 1)
    assert TModuleDef.from_json(G.to_json(), F).mats == G.mats
    with pytest.raises(UnsupportedRank):
        construct_tmodule("En", DrinfeldModule.carlitz(F), 1)
    with pytest.raises(ValueError):
        construct_tmodule("Hn", phi, 1)
    th, one, z = AlgCoeff.theta(F), AlgCoeff.one(F), AlgCoeff.zero(F)
    with pytest.raises(ValueError):  # A_0 - theta is not nilpotent
        TModuleDef(F, ([[th + one, z], [z, th]],))
    with pytest.raises(ParseError):
        TModuleDef.from_json({"mats": []}, F)
