"""Named verification suites.

Each suite expands into independent checks (a module-level function plus
plain arguments), so checks can be farmed out to worker processes; results
are collected in submission order and are therefore deterministic.
"""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import matrix as M
from .algebra import AlgCoeff, AlgFrac
from .drinfeld import (
    DrinfeldModule,
    agf_drinfeld,
    cm_fixture,
    exp_phi,
)
from .errors import ForgeError
from .ff import FieldParams
from .laurent import INF, LaurentApprox
from .motive import (
    basis_change,
    build_psi,
    carlitz_motive,
    delta0_iota,
    end_to_end_log_identity,
    exterior_cofactor_check,
    verify_difference_eq,
)
from .skew import SigmaMatrix, sigma_reduce, sigma_t_action
from .tate import TateSeries
from .tmodule import (
    agf_tmodule,
    asp_top_coeff,
    build_dP,
    composition_defects,
    construct_tmodule,
    dP_commutes,
    evaluate_tmodule,
    exp_log_coeffs_matrix,
)

SUITES = (
    "omega-feq",
    "agf-feq",
    "exp-log-inverse",
    "conjugation",
    "exterior",
    "sigma-oracle",
    "delta-iota",
    "difference-eq",
    "end-to-end",
    "asp",
    "dp-oracle",
)


def default_seed() -> int:
    """Seed for randomized checks: ``ANDERSON_FORGE_SEED`` or 0."""
    raw = os.environ.get("ANDERSON_FORGE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"ANDERSON_FORGE_SEED must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class SuiteConfig:
    q: int = 2
    m: int = 1
    s: int = 3
    prec: int = 120
    D: int = 24
    r: int | None = None
    n: int | None = None
    flavor: str | None = None
    fixture: str = "cm"
    trials: int = 5
    seed: int = 0

    def field(self, s_min: int = 0, m_even: bool = False) -> FieldParams:
        m = self.m
        if m_even and m % 2:
            m *= 2
        return FieldParams.from_q(self.q, m=m, s=max(self.s, s_min), prec=self.prec)


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    worst: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def worst(self) -> int | None:
        orders = [c.worst for c in self.checks if c.worst is not None]
        return min(orders) if orders else None

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "pass": self.passed,
            "worst_violation_order": self.worst,
            "checks": [c.to_json() for c in self.checks],
        }
        if timing:
            out["runtime_s"] = round(self.runtime, 3)
        return out


# ---------------------------------------------------------------------------
# helpers shared by the checks


def random_phi(F: FieldParams, r: int, rng: random.Random, deg: int = 2) -> DrinfeldModule:
    """Rank-r Drinfeld module with random coefficients of theta-degree <= deg."""
    order = F.gf.order

    def poly(nonzero: bool) -> AlgCoeff:
        while True:
            cs = [rng.randrange(order) for _ in range(rng.randrange(1, deg + 2))]
            c = AlgCoeff.theta_poly(F, cs)
            if not nonzero or not c.is_zero():
                return c

    return DrinfeldModule(F, tuple(poly(i == r - 1) for i in range(r)))


def default_phi(F: FieldParams, r: int) -> DrinfeldModule:
    """theta + (theta+1) tau + ... + theta^2 tau^r (fixed, non-constant a_r)."""
    a = [AlgCoeff.theta_poly(F, [1, 1])] + [AlgCoeff.one(F)] * (r - 2) + [AlgCoeff.theta_poly(F, [0, 0, 1])]
    return DrinfeldModule(F, tuple(a))


def small_point(F: FieldParams, rng: random.Random, lowest: int | None = None) -> LaurentApprox:
    """Random element of norm <= |1/theta| known to precision F.prec."""
    lo = F.E if lowest is None else lowest
    n = max(1, F.prec - lo)
    return LaurentApprox.from_codes(F, lo, [rng.randrange(F.gf.order) for _ in range(n)], prec=F.prec)


def _result(suite: str, name: str, fn, *args) -> CheckResult:
    try:
        out = fn(*args)
    except ForgeError as exc:
        return CheckResult(suite, name, False, None, f"{exc.name}: {exc}")
    if isinstance(out, CheckResult):
        return out
    passed, worst, detail = out
    return CheckResult(suite, name, bool(passed), worst, detail)


# ---------------------------------------------------------------------------
# individual checks (module level so that worker processes can import them)


def chk_omega_feq(cfg: SuiteConfig, n: int):
    F = cfg.field()
    mot = carlitz_motive(F, n, cfg.D)
    rep = verify_difference_eq(mot.Phi, mot.Psi)
    return rep.passed, None if rep.max_violation_order == INF else rep.max_violation_order, f"n={n} floor={rep.floor}"


def _agf_relation_order(phi: DrinfeldModule, f: TateSeries, ew: LaurentApprox):
    """Orders of phi(t) f - t f - Exp(w), coefficientwise."""
    worst = None
    for k, c in enumerate(f.coeffs):
        rhs = (f.coeffs[k - 1] if k else ew)
        diff = phi.apply(c) - rhs
        if not diff.is_zero():
            o = int(diff.valuation())
            worst = o if worst is None else min(worst, o)
    return worst


def chk_agf_drinfeld(cfg: SuiteConfig, which: str, seed: int):
    F = cfg.field()
    rng = random.Random(seed)
    phi = DrinfeldModule.carlitz(F) if which == "carlitz" else random_phi(F, 2, rng)
    w = small_point(F, rng, lowest=-F.E)
    f = agf_drinfeld(phi, w, cfg.D, check=True)  # MethodMismatch on disagreement
    worst = _agf_relation_order(phi, f, exp_phi(phi, w))
    return worst is None, worst, f"{which} D={cfg.D}"


def chk_agf_tmodule(cfg: SuiteConfig, kind: str, n: int, seed: int):
    F = cfg.field()
    rng = random.Random(seed)
    G = construct_tmodule(kind, None if kind == "CarlitzPower" else random_phi(F, 2, rng), n, F=F)
    w = [small_point(F, rng) for _ in range(G.d)]
    f = agf_tmodule(G, w, cfg.D, check=True)
    ew = evaluate_tmodule(G, "exp", w)
    worst = None
    for k in range(cfg.D + 1):
        ck = [x.coeffs[k] for x in f]
        lhs = evaluate_tmodule(G, "action", ck)
        rhs = [x.coeffs[k - 1] for x in f] if k else ew
        for a, b in zip(lhs, rhs):
            d = a - b
            if not d.is_zero():
                o = int(d.valuation())
                worst = o if worst is None else min(worst, o)
    return worst is None, worst, f"{kind} n={n}"


def chk_exp_log(cfg: SuiteConfig, kind: str, r: int, n: int, N: int, seed: int):
    F = cfg.field()
    rng = random.Random(seed)
    if kind == "CarlitzPower":
        G = construct_tmodule(kind, None, n, F=F)
    else:
        G = construct_tmodule(kind, default_phi(F, r), n)
    a = exp_log_coeffs_matrix(G, N)
    b = exp_log_coeffs_matrix(G, N, "log")
    ok = all(M.is_zero_matrix(x) for x in composition_defects(a, b, N)[1:])
    ok = ok and all(M.is_zero_matrix(x) for x in composition_defects(b, a, N)[1:])
    z = [small_point(F, rng) for _ in range(G.d)]
    y = evaluate_tmodule(G, "log", z)
    x = evaluate_tmodule(G, "exp", y)
    worst = None
    for u, v in zip(x, z):
        d = u - v
        if not d.is_zero():
            worst = int(d.valuation()) if worst is None else min(worst, int(d.valuation()))
    return ok and worst is None, worst, f"{kind} r={r} n={n} degree {N}"


def chk_conjugation(cfg: SuiteConfig, flavor: str, r: int, n: int, seed: int):
    F = cfg.field(s_min=r)
    phi = random_phi(F, r, random.Random(seed))
    bc = basis_change(flavor, phi, n)
    return bc.verified, None, f"{flavor} r={r} n={n}"


def chk_exterior(cfg: SuiteConfig, r: int, seed: int):
    F = cfg.field(s_min=r)
    phi = random_phi(F, r, random.Random(seed))
    return exterior_cofactor_check(phi), None, f"r={r}"


def _random_sigma_row(F: FieldParams, d: int, rng: random.Random, deg: int = 2) -> SigmaMatrix:
    zero = AlgCoeff.zero(F)
    order = F.gf.order
    coeffs = []
    for _ in range(rng.randrange(1, deg + 2)):
        coeffs.append([[AlgCoeff.theta_poly(F, [rng.randrange(order) for _ in range(2)]) for _ in range(d)]])
    return SigmaMatrix(coeffs, zero)


def chk_sigma_oracle(cfg: SuiteConfig, kind: str, r: int, n: int, seed: int):
    # sigma-products twist down by (degree of h) + (tau-degree of phi(t))
    F = cfg.field(s_min=2 + r)
    rng = random.Random(seed)
    if kind == "Carlitz":
        G = construct_tmodule("CarlitzPower", None, 1, F=F)
    elif kind == "Drinfeld":
        G = construct_tmodule("En", random_phi(F, r, rng), 0)
    elif kind == "CarlitzPower":
        G = construct_tmodule(kind, None, n, F=F)
    else:
        G = construct_tmodule(kind, random_phi(F, r, rng), n)
    T = G.phi_t()
    for _ in range(cfg.trials):
        h = _random_sigma_row(F, G.d, rng)
        left = sigma_reduce(sigma_t_action(h, T))
        right = T.apply(list(sigma_reduce(h)))
        if not all(a == b for a, b in zip(left, right)):
            return False, None, f"{kind} d={G.d}: mismatch"
    return True, None, f"{kind} d={G.d} x{cfg.trials}"


def chk_delta_iota(cfg: SuiteConfig, flavor: str, r: int, n: int, seed: int):
    F = cfg.field(s_min=r)
    rng = random.Random(seed)
    phi = random_phi(F, r, rng)
    order = F.gf.order
    for _ in range(cfg.trials):
        g = [
            TateSeries(F, [AlgFrac.of(AlgCoeff.theta_poly(F, [rng.randrange(order) for _ in range(2)]), F)
                           for _ in range(rng.randrange(1, n + 3))])
            for _ in range(r)
        ]
        delta0_iota(g, flavor, n, phi)  # raises OracleMismatch
    return True, None, f"{flavor} r={r} n={n} x{cfg.trials}"


def chk_difference_eq(cfg: SuiteConfig, which: str, n: int):
    if which == "carlitz":
        F = cfg.field()
        mot = carlitz_motive(F, max(n, 1), cfg.D)
    else:
        F = cfg.field(m_even=True)
        phi, basis = cm_fixture(F)
        mot = build_psi(which, phi, basis, n, cfg.D)
    rep = verify_difference_eq(mot.Phi, mot.Psi)
    worst = None if rep.max_violation_order == INF else rep.max_violation_order
    return rep.passed, worst, f"{which} n={n} floor={rep.floor}"


def chk_end_to_end(cfg: SuiteConfig, flavor: str, n: int, seed: int):
    F = cfg.field(m_even=True)
    phi, _ = cm_fixture(F)
    rng = random.Random(seed)
    d = 2 * n + 1
    th = AlgFrac.theta(F)
    order = F.gf.order
    alpha = [AlgCoeff.const(F, rng.randrange(order)) / th for _ in range(d)]
    rep = end_to_end_log_identity(flavor, phi, n, alpha, cfg.D)
    worst = None if rep.max_deviation_order == INF else rep.max_deviation_order
    return rep.passed and rep.floor >= 50, worst, f"{flavor} n={n} floor={rep.floor}"


def chk_asp(cfg: SuiteConfig, kind: str, r: int, n: int):
    F = cfg.field()
    G = construct_tmodule(kind, None, n, F=F) if kind == "CarlitzPower" else construct_tmodule(kind, default_phi(F, r), n)
    ok, _ = asp_top_coeff(G)
    return ok, None, f"{kind} r={r} n={n}"


def a_of_A0(G, coeffs) -> list:
    """``a(d phi(t))`` for ``a = sum c_k t^k`` (F_q codes)."""
    F = G.F
    A0 = M.mat_map(G.A(0), lambda x: AlgFrac.of(x, F))
    z, one = AlgFrac.zero(F), AlgFrac.one(F)
    acc = M.zeros(G.d, G.d, z)
    P = M.identity(G.d, one, z)
    for c in coeffs:
        acc = M.add(acc, M.scale(P, AlgFrac.of(AlgCoeff.const(F, c), F)))
        P = M.mul(P, A0, z)
    return acc


def chk_dp(cfg: SuiteConfig, flavor: str, r: int, n: int, coeffs: tuple):
    F = cfg.field(s_min=r)
    phi = default_phi(F, r)
    G = construct_tmodule(flavor, phi, n)
    a = TateSeries(F, [AlgCoeff.const(F, c) for c in coeffs])
    Fm = [[a if i == j else TateSeries.zero(F) for j in range(r)] for i in range(r)]
    dP = build_dP(Fm, phi, n, flavor)
    ok = M.equal(dP, a_of_A0(G, coeffs)) and dP_commutes(G, dP)
    return ok, None, f"{flavor} r={r} n={n} a={list(coeffs)}"


# ---------------------------------------------------------------------------
# suite expansion


def _pick(value, default):
    return default if value is None else (value,)


def expand(suite: str, cfg: SuiteConfig) -> list[tuple]:
    """(check name, function, args) for a suite under ``cfg``."""
    seed = cfg.seed
    out: list[tuple] = []
    if suite == "omega-feq":
        for n in _pick(cfg.n, (1, 2)):
            out.append((f"n={n}", chk_omega_feq, (cfg, n)))
    elif suite == "agf-feq":
        for t in range(cfg.trials):
            out.append((f"carlitz#{t}", chk_agf_drinfeld, (cfg, "carlitz", seed + t)))
            out.append((f"rank2#{t}", chk_agf_drinfeld, (cfg, "rank2", seed + 100 + t)))
        for kind, n in (("En", 1), ("Gn", 1), ("CarlitzPower", 2)):
            out.append((f"{kind}{n}", chk_agf_tmodule, (cfg, kind, n, seed + 200)))
    elif suite == "exp-log-inverse":
        N = 8
        for r in _pick(cfg.r, (2, 3)):
            for n in _pick(cfg.n, (0, 1, 2)):
                out.append((f"En r={r} n={n}", chk_exp_log, (cfg, "En", r, n, N, seed)))
                if n >= 1:
                    out.append((f"Gn r={r} n={n}", chk_exp_log, (cfg, "Gn", r, n, N, seed)))
        for n in _pick(cfg.n, (1, 2)):
            if n >= 1:
                out.append((f"C^{n}", chk_exp_log, (cfg, "CarlitzPower", 1, n, N, seed)))
    elif suite == "conjugation":
        for r in _pick(cfg.r, (2, 3, 4)):
            for n in _pick(cfg.n, (0, 1, 2)):
                for t in range(cfg.trials):
                    out.append((f"En r={r} n={n} #{t}", chk_conjugation, (cfg, "En", r, n, seed + t)))
                    if n >= 1:
                        out.append((f"Gn r={r} n={n} #{t}", chk_conjugation, (cfg, "Gn", r, n, seed + t)))
    elif suite == "exterior":
        for r in _pick(cfg.r, (2, 3, 4)):
            out.append((f"r={r}", chk_exterior, (cfg, r, seed)))
    elif suite == "sigma-oracle":
        out.append(("carlitz", chk_sigma_oracle, (cfg, "Carlitz", 1, 1, seed)))
        for r in _pick(cfg.r, (2, 3)):
            out.append((f"drinfeld r={r}", chk_sigma_oracle, (cfg, "Drinfeld", r, 0, seed)))
            for n in _pick(cfg.n, (1, 2)):
                out.append((f"En r={r} n={n}", chk_sigma_oracle, (cfg, "En", r, n, seed)))
                out.append((f"Gn r={r} n={n}", chk_sigma_oracle, (cfg, "Gn", r, n, seed)))
        for n in _pick(cfg.n, (1, 2, 3)):
            out.append((f"C^{n}", chk_sigma_oracle, (cfg, "CarlitzPower", 1, n, seed)))
    elif suite == "delta-iota":
        for flavor in _pick(cfg.flavor, ("En", "Gn")):
            for r in _pick(cfg.r, (2, 3)):
                for n in _pick(cfg.n, (1, 2)):
                    out.append((f"{flavor} r={r} n={n}", chk_delta_iota, (cfg, flavor, r, n, seed)))
    elif suite == "difference-eq":
        if cfg.fixture == "carlitz":
            for n in _pick(cfg.n, (1, 2)):
                out.append((f"carlitz n={n}", chk_difference_eq, (cfg, "carlitz", n)))
        else:
            out.append(("Drinfeld", chk_difference_eq, (cfg, "Drinfeld", 0)))
            for n in _pick(cfg.n, (0, 1)):
                out.append((f"En n={n}", chk_difference_eq, (cfg, "En", n)))
                if n >= 1:
                    out.append((f"Gn n={n}", chk_difference_eq, (cfg, "Gn", n)))
    elif suite == "end-to-end":
        for flavor in _pick(cfg.flavor, ("En", "Gn")):
            for n in _pick(cfg.n, (1, 2)):
                out.append((f"{flavor} n={n}", chk_end_to_end, (cfg, flavor, n, seed)))
    elif suite == "asp":
        for r in _pick(cfg.r, (2, 3)):
            for n in _pick(cfg.n, (0, 1)):
                out.append((f"En r={r} n={n}", chk_asp, (cfg, "En", r, n)))
            out.append((f"Gn r={r} n=1", chk_asp, (cfg, "Gn", r, 1)))
        for n in _pick(cfg.n, (1, 2, 3)):
            if n >= 1:
                out.append((f"C^{n}", chk_asp, (cfg, "CarlitzPower", 1, n)))
    elif suite == "dp-oracle":
        for flavor in _pick(cfg.flavor, ("En", "Gn")):
            for r in _pick(cfg.r, (2, 3)):
                for n in _pick(cfg.n, (1, 2)):
                    for coeffs in ((0, 1), (0, 0, 1), (1, 1)):
                        out.append((f"{flavor} r={r} n={n} a={list(coeffs)}", chk_dp, (cfg, flavor, r, n, coeffs)))
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return out


def _run_one(suite: str, name: str, fn, args) -> CheckResult:
    return _result(suite, name, fn, *args)


def run_suite(suite: str, cfg: SuiteConfig, jobs: int = 1) -> SuiteReport:
    """Run every check of ``suite``; ``jobs > 1`` uses worker processes."""
    checks = expand(suite, cfg)
    t0 = time.perf_counter()
    if jobs > 1 and len(checks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_run_one, suite, name, fn, args) for name, fn, args in checks]
            results = [f.result() for f in futs]
    else:
        results = [_run_one(suite, name, fn, args) for name, fn, args in checks]
    return SuiteReport(suite, results, time.perf_counter() - t0)


__all__ = [
    "SUITES",
    "CheckResult",
    "SuiteConfig",
    "SuiteReport",
    "default_phi",
    "default_seed",
    "expand",
    "random_phi",
    "run_suite",
    "small_point",
]
