"""Acceptance suite: fourteen certified identities at their stated parameters.

Every test records exactly one ``criterion NN PASS|FAIL`` line (printed in
the terminal summary, see conftest.py) together with its runtime and budget.
"""

from __future__ import annotations

import functools
import random
import time

import pytest

from anderson_forge import matrix as M
from anderson_forge.algebra import AlgCoeff, AlgFrac
from anderson_forge.drinfeld import (
    DrinfeldModule,
    agf_drinfeld,
    carlitz_polylog,
    cm_fixture,
    exp_phi,
    quasilog,
    quasilog_series,
)
from anderson_forge.ff import FieldParams
from anderson_forge.laurent import INF, LaurentApprox, embed
from anderson_forge.motive import (
    basis_change,
    build_psi,
    carlitz_motive,
    delta0_iota,
    end_to_end_log_identity,
    exterior_cofactor_check,
    verify_difference_eq,
)
from anderson_forge.skew import sigma_reduce, sigma_t_action
from anderson_forge.suites import (
    SuiteConfig,
    _random_sigma_row,
    a_of_A0,
    chk_agf_tmodule,
    chk_exp_log,
    default_phi,
    random_phi,
    small_point,
)
from anderson_forge.tate import TateSeries, carlitz_period, omega_series, tate_eval
from anderson_forge.tmodule import (
    asp_top_coeff,
    build_dP,
    construct_tmodule,
    dP_commutes,
    evaluate_tmodule,
)

RESULTS: list[str] = []


def criterion(num: int, title: str, budget: float):
    """Time the test, enforce the runtime budget and record one summary line."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kw):
            t0 = time.perf_counter()
            detail, ok = "", False
            try:
                detail = fn(*args, **kw) or ""
                ok = True
            except BaseException as exc:
                detail = f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
                raise
            finally:
                dt = time.perf_counter() - t0
                within = dt < budget
                status = "PASS" if ok and within else "FAIL"
                if ok and not within:
                    detail = f"runtime budget exceeded; {detail}"
                RESULTS.append(f"criterion {num:2d} {status}  {title}  [{dt:.2f}s / {budget:.0f}s]  {detail}")
            assert dt < budget, f"runtime {dt:.2f}s exceeds the {budget}s budget"

        return wrapper

    return deco


def _is_zero_vec(xs) -> bool:
    return all(x.is_zero() for x in xs)


def _worst(diffs) -> int | float:
    w = INF
    for d in diffs:
        if not d.is_zero():
            w = min(w, d.valuation())
    return w


# ---------------------------------------------------------------------------


@criterion(1, "Omega functional equation (q in {2,3}, s=2, D=128, prec 400)", 5)
def test_c01_omega_functional_equation():
    notes = []
    for q in (2, 3):
        F = FieldParams.from_q(q, s=2, prec=400)
        D = 128
        om = omega_series(F, D)
        theta_q = AlgFrac.theta(F) ** q
        rhs = TateSeries(F, [-theta_q, AlgFrac.one(F)]) * om.twist(1)
        floor = INF
        for k in range(D + 1):
            a, b = om.coeffs[k], rhs.coeffs[k]
            d = a - b
            assert d.is_zero(), f"q={q}: coefficient t^{k} violates at order {d.valuation()}"
            floor = min(floor, d.prec)
        assert floor >= 400
        notes.append(f"q={q} floor={floor}")
    return "; ".join(notes)


@criterion(2, "Carlitz period consistency", 5)
def test_c02_pitilde():
    notes = []
    for q, s in ((2, 1), (2, 2), (3, 1)):
        F = FieldParams.from_q(q, s=s, prec=200)
        pi = carlitz_period(F)
        assert pi.valuation() == -(q ** (s + 1))
        om = omega_series(F, 64)
        prod = pi * tate_eval(om, LaurentApprox.theta(F))
        d = prod + LaurentApprox.one(F)
        assert d.is_zero(), f"pi*Omega(theta)+1 has order {d.valuation()} < prec {d.prec}"
        e = exp_phi(DrinfeldModule.carlitz(F), pi)
        assert e.is_zero()
        notes.append(f"q={q},s={s}: floors {d.prec}/{e.prec}")
    return "; ".join(notes)


@criterion(3, "Exp/Log inversion to degree 12 and round trips", 60)
def test_c03_exp_log_inversion():
    # the recursions only use forward twists, so the s = 0 ring suffices
    cfg = SuiteConfig(q=2, m=1, s=0, prec=120)
    cases = []
    for r in (2, 3):
        for n in (0, 1, 2):
            cases.append(("En", r, n))
            if n >= 1:
                cases.append(("Gn", r, n))
    cases += [("CarlitzPower", 1, n) for n in (1, 2)]
    for kind, r, n in cases:
        ok, worst, detail = chk_exp_log(cfg, kind, r, n, 12, 1000 + 10 * r + n)
        assert ok, f"{detail}: worst {worst}"
    return f"{len(cases)} modules"


@criterion(4, "AGF: definitional vs recursive series, phi(t)G = tG + Exp(w), D=32", 60)
def test_c04_agf():
    cfg = SuiteConfig(q=2, m=1, s=3, prec=120, D=32)
    F = cfg.field()
    count = 0
    for which in ("carlitz", "rank2"):
        rng = random.Random(4000 + len(which))
        phi = DrinfeldModule.carlitz(F) if which == "carlitz" else default_phi(F, 2)
        for _ in range(20):
            w = small_point(F, rng, lowest=-F.E)
            f = agf_drinfeld(phi, w, cfg.D, check=True)
            ew = exp_phi(phi, w)
            diffs = [phi.apply(c) - (f.coeffs[k - 1] if k else ew) for k, c in enumerate(f.coeffs)]
            assert _is_zero_vec(diffs), f"{which}: worst {_worst(diffs)}"
            count += 1
    for kind, n in (("En", 1), ("Gn", 1), ("CarlitzPower", 2)):
        for t in range(20):
            ok, worst, detail = chk_agf_tmodule(cfg, kind, n, 4100 + t)
            assert ok, f"{detail}: worst {worst}"
            count += 1
    return f"{count} points, 5 modules"


@criterion(5, "quasi-logarithms: AGF twist vs direct recursion (CM, delta_0 and delta_1)", 30)
def test_c05_quasilog():
    F = FieldParams.from_q(2, m=2, s=0, prec=120)
    phi, _ = cm_fixture(F)
    rng = random.Random(5)
    floor = INF
    for j in range(10):
        w = small_point(F, rng, lowest=(-F.E, 0, F.E)[j % 3])
        for i in (0, 1):
            a, b = quasilog(phi, w, i), quasilog_series(phi, w, i)
            d = a - b
            assert d.is_zero(), f"point {j} i={i}: order {d.valuation()} < {d.prec}"
            floor = min(floor, d.prec)
    return f"floor {floor}"


@criterion(6, "conjugation identities for E_n and G_n (r in {2,3,4}, n in {0,1,2})", 30)
def test_c06_conjugation():
    count = 0
    for r in (2, 3, 4):
        F = FieldParams.from_q(2, s=r, prec=60)
        for n in (0, 1, 2):
            for draw in range(5):
                phi = random_phi(F, r, random.Random(600 + 10 * r + draw))
                for flavor in ("En", "Gn") if n >= 1 else ("En",):
                    assert basis_change(flavor, phi, n).verified, f"{flavor} r={r} n={n} draw {draw}"
                    count += 1
    return f"{count} exact identities"


@criterion(7, "exterior-power oracle equals the cofactor matrix (r in {2,3,4})", 10)
def test_c07_exterior():
    for r in (2, 3, 4):
        F = FieldParams.from_q(2, s=r, prec=60)
        for draw in range(3):
            phi = random_phi(F, r, random.Random(700 + 10 * r + draw))
            assert exterior_cofactor_check(phi), f"r={r} draw {draw}"
    return "9 modules"


@criterion(8, "sigma-reduction oracle sigma_reduce(t h) = phi(t) sigma_reduce(h)", 30)
def test_c08_sigma_reduction():
    rng = random.Random(8)
    modules = []
    F1 = FieldParams.from_q(2, s=3, prec=60)
    modules.append(("Carlitz", construct_tmodule("CarlitzPower", None, 1, F=F1)))
    for r in (2, 3):
        F = FieldParams.from_q(2, s=2 + r, prec=60)
        modules.append((f"Drinfeld r={r}", construct_tmodule("En", random_phi(F, r, rng), 0)))
        for n in (1, 2):
            modules.append((f"E_{n} r={r}", construct_tmodule("En", random_phi(F, r, rng), n)))
            modules.append((f"G_{n} r={r}", construct_tmodule("Gn", random_phi(F, r, rng), n)))
    for n in (2, 3):
        modules.append((f"C^{n}", construct_tmodule("CarlitzPower", None, n, F=F1)))
    for name, G in modules:
        T = G.phi_t()
        for _ in range(20):
            h = _random_sigma_row(G.F, G.d, rng)
            left = sigma_reduce(sigma_t_action(h, T))
            right = T.apply(list(sigma_reduce(h)))
            assert all(a == b for a, b in zip(left, right)), name
    return f"{len(modules)} modules x 20"


@criterion(9, "delta_0 o iota formula vs sigma-expansion (20 vectors per case)", 30)
def test_c09_delta_iota():
    count = 0
    for r in (2, 3):
        F = FieldParams.from_q(2, s=r, prec=60)
        order = F.gf.order
        for n in (1, 2):
            for flavor in ("En", "Gn"):
                rng = random.Random(900 + 10 * r + n)
                phi = random_phi(F, r, rng)
                for _ in range(20):
                    g = [
                        TateSeries(
                            F,
                            [AlgFrac.of(AlgCoeff.theta_poly(F, [rng.randrange(order) for _ in range(3)]), F)
                             for _ in range(rng.randrange(1, n + 4))],
                        )
                        for _ in range(r)
                    ]
                    delta0_iota(g, flavor, n, phi, oracle=True)  # raises OracleMismatch
                    count += 1
    return f"{count} vectors"


@criterion(10, "end-to-end logarithm identity (CM fixture, floor >= 50)", 120)
def test_c10_end_to_end():
    F = FieldParams.from_q(2, m=2, s=0, prec=120)
    phi, _ = cm_fixture(F)
    th = AlgFrac.theta(F)
    order = F.gf.order
    rng = random.Random(10)
    floors = []
    for flavor in ("En", "Gn"):
        for n in (1, 2):
            d = 2 * n + 1
            alpha = []
            for _ in range(d):
                x = AlgFrac.zero(F)
                for j in (1, 2, 3):
                    x = x + AlgFrac.of(AlgCoeff.const(F, rng.randrange(order)), F) / th**j
                alpha.append(x)
            rep = end_to_end_log_identity(flavor, phi, n, alpha, 24)
            assert rep.passed, f"{flavor} n={n}: deviation order {rep.max_deviation_order}"
            assert rep.floor >= 50, f"{flavor} n={n}: floor {rep.floor}"
            floors.append(rep.floor)
    return f"min floor {min(floors)}"


@criterion(11, "Carlitz polylogarithm = last coordinate of Log on C^(x)n", 30)
def test_c11_polylog():
    notes = 0
    for q in (2, 3):
        F = FieldParams.from_q(q, s=1, prec=120)
        th = AlgFrac.theta(F)
        for n in (1, 2, 3):
            G = construct_tmodule("CarlitzPower", None, n, F=F)
            for a in (th.inverse(), AlgFrac.one(F), th):
                alpha = embed(a, F)
                if -alpha.valuation() * (q - 1) >= n * q * F.E:
                    continue  # outside the convergence domain
                li = carlitz_polylog(alpha, n)
                log = evaluate_tmodule(G, "log", [LaurentApprox.zero(F)] * (n - 1) + [alpha])
                d = li - log[-1]
                assert d.is_zero(), f"q={q} n={n}: order {d.valuation()}"
                notes += 1
    return f"{notes} (q, n, alpha) cases"


@criterion(12, "dP oracle for scalar endomorphisms, and dP commutes with A_0", 30)
def test_c12_dp():
    count = 0
    for flavor in ("En", "Gn"):
        for r in (2, 3):
            F = FieldParams.from_q(2, s=r, prec=60)
            phi = default_phi(F, r)
            for n in (1, 2):
                G = construct_tmodule(flavor, phi, n)
                for coeffs in ((0, 1), (0, 0, 1), (1, 1)):
                    a = TateSeries(F, [AlgCoeff.const(F, c) for c in coeffs])
                    Fm = [[a if i == j else TateSeries.zero(F) for j in range(r)] for i in range(r)]
                    dP = build_dP(Fm, phi, n, flavor)
                    assert M.equal(dP, a_of_A0(G, coeffs)), f"{flavor} r={r} n={n} a={coeffs}"
                    assert dP_commutes(G, dP)
                    count += 1
    return f"{count} endomorphisms"


@criterion(13, "rigid analytic trivializations satisfy Psi = Phi^(1) Psi^(1) (D=32)", 120)
def test_c13_difference_equations():
    D = 32
    Fc = FieldParams.from_q(2, s=1, prec=120)
    reports = []
    for n in (1, 2, 3):
        mot = carlitz_motive(Fc, n, D)
        reports.append((f"Carlitz^{n}", verify_difference_eq(mot.Phi, mot.Psi)))
    F = FieldParams.from_q(2, m=2, s=0, prec=120)
    phi, basis = cm_fixture(F)
    mot = build_psi("Drinfeld", phi, basis, 0, D)
    reports.append(("Phi_phi", verify_difference_eq(mot.Phi, mot.Psi)))
    for n in (0, 1):
        mot = build_psi("En", phi, basis, n, D)
        reports.append((f"E_{n}", verify_difference_eq(mot.Phi, mot.Psi)))
    mot = build_psi("Gn", phi, basis, 1, D)
    reports.append(("G_1", verify_difference_eq(mot.Phi, mot.Psi)))
    for name, rep in reports:
        assert rep.passed, f"{name}: violation at order {rep.max_violation_order} (floor {rep.floor})"
        assert rep.D == D
    return "min floor " + str(min(rep.floor for _, rep in reports))


@criterion(14, "almost strict purity of E_n, G_n and C^(x)n", 60)
def test_c14_asp():
    F = FieldParams.from_q(2, s=3, prec=60)
    cases = []
    for r in (2, 3):
        phi = default_phi(F, r)
        cases += [(f"E_{n} r={r}", construct_tmodule("En", phi, n)) for n in (0, 1)]
        cases.append((f"G_1 r={r}", construct_tmodule("Gn", phi, 1)))
    cases += [(f"C^{n}", construct_tmodule("CarlitzPower", None, n, F=F)) for n in (1, 2, 3)]
    for name, G in cases:
        ok, _ = asp_top_coeff(G)
        assert ok, name
    return f"{len(cases)} t-modules"


# sentinels: the checks above must be able to fail


def test_sentinel_difference_eq_detects_perturbation():
    F = FieldParams.from_q(2, s=1, prec=120)
    mot = carlitz_motive(F, 1, 16)
    psi = mot.Psi[0][0]
    bumped = list(psi.coeffs)
    bumped[5] = bumped[5] + LaurentApprox.monomial(F, 60)
    rep = verify_difference_eq(mot.Phi, [[TateSeries(F, bumped, psi.trunc)]])
    assert not rep.passed and rep.max_violation_order <= 60


def test_sentinel_polylog_differs_across_n():
    F = FieldParams.from_q(2, s=1, prec=120)
    x = embed(AlgFrac.theta(F).inverse(), F)
    assert not (carlitz_polylog(x, 1) - carlitz_polylog(x, 2)).is_zero()


@pytest.mark.parametrize("flavor", ["En", "Gn"])
def test_sentinel_end_to_end_detects_wrong_point(flavor):
    """Feeding Log(alpha) for one alpha but h for another must fail."""
    from anderson_forge.motive import build_g_h, g_at_theta

    F = FieldParams.from_q(2, m=2, s=0, prec=120)
    phi, _ = cm_fixture(F)
    th = AlgFrac.theta(F)
    alpha = [th.inverse(), AlgFrac.zero(F), th.inverse() ** 2]
    other = [th.inverse() ** 2, th.inverse(), AlgFrac.zero(F)]
    G = construct_tmodule(flavor, phi, 1)
    y = evaluate_tmodule(G, "log", [embed(x, F) for x in other])
    from anderson_forge.errors import RelationViolated

    with pytest.raises(RelationViolated):
        build_g_h(flavor, phi, 1, y, alpha, 16)
    pair = build_g_h(flavor, phi, 1, y, alpha, 16, check=False)
    assert len(g_at_theta(pair)) == len(pair.g) == phi.r
