"""Anderson t-modules ``phi(t) = A_0 + A_1 tau + ... + A_m tau^m`` with ``A_0 = theta Id + N``.

Constructors for the families E_n (dimension rn+r-1), G_n (dimension rn+1)
and the Carlitz tensor powers C^{(x)n}; exact matrix Exp/Log coefficients via
Sylvester solves; evaluation with per-coordinate error floors; vector
Anderson generating functions by two routes; the almost-strict-purity check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import matrix as M
from .algebra import AlgCoeff, AlgFrac
from . import poly as P
from .cfrac import CFrac, _plane_sum, common_form, descend, raise_planes
from .drinfeld import DrinfeldModule, term_cap
from .errors import ConvergenceUncertified, MethodMismatch, ParseError, PrecisionExhausted, UnsupportedRank
from .ff import FieldParams
from .laurent import INF, LaurentApprox, alg_embed
from .skew import TauMatrix
from .tate import TateSeries, geometric_inverse, hyperderivative

Matrix = M.Matrix
KINDS = ("En", "Gn", "CarlitzPower", "custom")


@dataclass(frozen=True, eq=False)
class TModuleDef:
    """A t-module given by ``mats = (A_0, ..., A_m)`` over the ring of ``F``."""

    F: FieldParams
    mats: tuple
    kind: str = "custom"
    phi: DrinfeldModule | None = None
    n: int | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        mats = tuple(tuple(tuple(row) for row in A) for A in self.mats)
        object.__setattr__(self, "mats", mats)
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        d = len(mats[0])
        if any(len(A) != d or any(len(r) != d for r in A) for A in mats):
            raise ValueError("all A_k must be square of the same size")
        th = AlgCoeff.theta(self.F)
        N = [[mats[0][i][j] - (th if i == j else 0) for j in range(d)] for i in range(d)]
        for row in N:
            for x in row:
                if not x.is_const():
                    raise ValueError("A_0 - theta Id must have constant (F_q) entries")
        P = N
        for _ in range(d - 1):
            P = M.mul(P, N, AlgCoeff.zero(self.F))
        if not M.is_zero_matrix(P):
            raise ValueError("A_0 - theta Id is not nilpotent")

    # ----------------------------------------------------------- queries
    @property
    def d(self) -> int:
        return len(self.mats[0])

    @property
    def m(self) -> int:
        return len(self.mats) - 1

    @property
    def N(self) -> Matrix:
        th = AlgCoeff.theta(self.F)
        return [[self.mats[0][i][j] - (th if i == j else 0) for j in range(self.d)] for i in range(self.d)]

    def A(self, k: int) -> Matrix:
        return [list(r) for r in self.mats[k]]

    def phi_t(self) -> TauMatrix:
        return TauMatrix([self.A(k) for k in range(len(self.mats))], AlgCoeff.zero(self.F))

    def phi_of(self, a: Sequence[int]) -> TauMatrix:
        """``phi(a)`` for ``a = sum a_k t^k`` with F_q coefficient codes."""
        F = self.F
        zero, one = AlgCoeff.zero(F), AlgCoeff.one(F)
        out = TauMatrix.identity(self.d, one, zero) * zero
        P = TauMatrix.identity(self.d, one, zero)
        T = self.phi_t()
        for k, c in enumerate(a):
            if k:
                P = P * T
            if c % F.gf.order:
                out = out + P * AlgCoeff.const(F, c)
        return out

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "d": self.d,
            "mats": [[[x.to_json() for x in row] for row in A] for A in self.mats],
            **({"n": self.n} if self.n is not None else {}),
            **({"phi": self.phi.to_json()} if self.phi is not None else {}),
        }

    @classmethod
    def from_json(cls, obj: dict, F: FieldParams | None = None) -> "TModuleDef":
        try:
            mats = [[[AlgCoeff.from_json(x, F) for x in row] for row in A] for A in obj["mats"]]
            kind = obj.get("kind", "custom")
            d = int(obj["d"])
            phi = DrinfeldModule.from_json(obj["phi"], F) if "phi" in obj else None
            n = obj.get("n")
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed t-module JSON: {exc}") from exc
        if not mats or len(mats[0]) != d:
            raise ParseError("declared dimension does not match the matrices")
        return cls(mats[0][0][0].F, tuple(mats), kind, phi, n)

    def __repr__(self) -> str:
        return f"TModuleDef(kind={self.kind}, d={self.d}, m={self.m})"


# ---------------------------------------------------------------------------
# constructors


def _sign(F: FieldParams, r: int) -> int:
    """Code of (-1)^(r-1)."""
    return 1 if (r - 1) % 2 == 0 else F.gf.neg(1)


def construct_tmodule(kind: str, phi: DrinfeldModule | None = None, n: int = 1, F: FieldParams | None = None) -> TModuleDef:
    """Build E_n, G_n (from a Drinfeld module of rank r >= 2) or C^{(x)n}."""
    if kind == "CarlitzPower":
        if F is None:
            if phi is None:
                raise ValueError("CarlitzPower needs field parameters")
            F = phi.F
        return carlitz_power(F, n)
    if phi is None:
        raise ValueError(f"{kind} needs a Drinfeld module")
    if phi.r < 2:
        raise UnsupportedRank("E_n and G_n are defined for Drinfeld modules of rank r >= 2")
    if kind == "En":
        return _build_En(phi, n)
    if kind == "Gn":
        return _build_Gn(phi, n)
    raise ValueError(f"unknown kind {kind!r}")


def carlitz_power(F: FieldParams, n: int) -> TModuleDef:
    if n < 1:
        raise ValueError("n must be >= 1")
    zero, one, th = AlgCoeff.zero(F), AlgCoeff.one(F), AlgCoeff.theta(F)
    A0 = [[th if i == j else one if j == i + 1 else zero for j in range(n)] for i in range(n)]
    A1 = [[one if (i, j) == (n - 1, 0) else zero for j in range(n)] for i in range(n)]
    return TModuleDef(F, (A0, A1), "CarlitzPower", None, n)


def _build_En(phi: DrinfeldModule, n: int) -> TModuleDef:
    if n < 0:
        raise ValueError("n must be >= 0")
    F, r, a = phi.F, phi.r, phi.a
    zero, one, th = AlgCoeff.zero(F), AlgCoeff.one(F), AlgCoeff.theta(F)
    sg = _sign(F, r)
    if n == 0:
        d = r - 1
        A0 = [[th if i == j else zero for j in range(d)] for i in range(d)]
        E1 = [[zero] * d for _ in range(d)]
        for j in range(1, r - 1):  # rows 1..r-2
            E1[j - 1][0] = -a[r - j - 1]
            E1[j - 1][j] = a[r - 1]
        E1[d - 1][0] = -a[0]
        E1 = M.scale(E1, AlgCoeff.const(F, sg))
        E2 = [[zero] * d for _ in range(d)]
        E2[d - 1][0] = a[r - 1]
        return TModuleDef(F, (A0, E1, E2), "En", phi, 0)
    d = r * n + r - 1
    A0 = [[th if i == j else zero for j in range(d)] for i in range(d)]
    for i in range(r * n - 1):
        A0[i][i + r] = one
    E = [[zero] * d for _ in range(d)]
    E[r * n - 1][0] = one
    for j in range(1, r):
        E[r * n - 1 + j][0] = -a[r - j - 1]
        E[r * n - 1 + j][j] = a[r - 1]
    E = M.scale(E, AlgCoeff.const(F, sg))
    return TModuleDef(F, (A0, E), "En", phi, n)


def _build_Gn(phi: DrinfeldModule, n: int) -> TModuleDef:
    if n < 1:
        raise ValueError("n must be >= 1")
    F, r, a = phi.F, phi.r, phi.a
    zero, one, th = AlgCoeff.zero(F), AlgCoeff.one(F), AlgCoeff.theta(F)
    d = r * n + 1
    A0 = [[th if i == j else zero for j in range(d)] for i in range(d)]
    for i in range(r * n + 1 - r):
        A0[i][i + r] = one
    E = [[zero] * d for _ in range(d)]
    base = r * n + 1 - r
    for j in range(1, r):
        E[base + j - 1][j - 1] = one
    for k in range(r):
        E[d - 1][k] = a[k]
    return TModuleDef(F, (A0, E), "Gn", phi, n)


# ---------------------------------------------------------------------------
# exact Exp / Log coefficients


def _sparse_N(G: TModuleDef) -> list[tuple[int, int, int]]:
    return [(i, j, x.coeff(0)) for i, row in enumerate(G.N) for j, x in enumerate(row) if not x.is_zero()]


def _ad(Nsp, Y: Matrix, zero) -> Matrix:
    """``N Y - Y N`` for constant sparse N."""
    d = len(Y)
    out = [[zero] * d for _ in range(d)]
    for i, k, c in Nsp:  # (N Y)[i][j] += c Y[k][j]
        for j in range(d):
            y = Y[k][j]
            if not y.is_zero():
                out[i][j] = out[i][j] + y.scale(c)
    for k, j, c in Nsp:  # (Y N)[i][j] += Y[i][k] c
        for i in range(d):
            y = Y[i][k]
            if not y.is_zero():
                out[i][j] = out[i][j] - y.scale(c)
    return out


def sylvester_solve(Nsp, R: Matrix, i: int, zero) -> Matrix:
    """Solve ``c_i X + X N - N X = R`` with ``c_i = theta^(q^i) - theta``.

    This is the fixed point of ``X <- (R + N X - X N) / c_i``; since
    ``Y -> N Y - Y N`` is nilpotent the iteration terminates, and its limit
    is ``sum_k ad_N^k(R) / c_i^(k+1)``, accumulated here term by term.
    """
    d = len(R)
    X = [[zero] * d for _ in range(d)]
    Y = R
    k = 0
    while not M.is_zero_matrix(Y):
        k += 1
        if k > 2 * d + 1:
            raise RuntimeError("commutator iteration failed to terminate (N not nilpotent?)")
        X = [[x + y.div_c(i, k) for x, y in zip(rx, ry)] for rx, ry in zip(X, Y)]
        Y = _ad(Nsp, Y, zero)
    return X


def _work_mats(G: TModuleDef):
    F0 = G.F.with_(s=0)
    low = [[[descend(x) for x in row] for row in A] for A in G.mats]
    if all(x is not None for A in low for row in A for x in row):
        return F0, [[[CFrac(x) for x in row] for row in A] for A in low]
    return G.F, [[[CFrac(x) for x in row] for row in A] for A in G.mats]


def _coeffs(G: TModuleDef, N: int, which: str) -> list[Matrix]:
    F0, mats = _work_mats(G)
    zero = CFrac.zero(F0)
    one = CFrac.one(F0)
    cache = G._cache.setdefault(which, [M.identity(G.d, one, zero)])
    Nsp = _sparse_N(G)
    m = len(mats) - 1
    for i in range(len(cache), N + 1):
        R = [[zero] * G.d for _ in range(G.d)]
        for k in range(1, min(i, m) + 1):
            if which == "exp":
                prod = M.mul(mats[k], M.twist(cache[i - k], k), zero)
            else:
                prod = M.mul(cache[i - k], M.twist(mats[k], i - k), zero)
            R = M.add(R, prod)
        if which == "log":
            R = M.neg(R)
        cache.append(sylvester_solve(Nsp, R, i, zero))
    out = cache[: N + 1]
    if F0 is not G.F:
        out = [M.mat_map(A, lambda x: x.lift(G.F)) for A in out]
    return out


def exp_log_coeffs_matrix(G: TModuleDef, N: int, which: str = "exp", check: bool = False) -> list[Matrix]:
    """``alpha_0..alpha_N`` (exp) or ``beta_0..beta_N`` (log) as matrices of CFrac.

    exp: ``c_i alpha_i + alpha_i N - N alpha_i = sum_k A_k alpha_{i-k}^(k)``;
    log: ``c_i beta_i + beta_i N - N beta_i = -sum_k beta_{i-k} A_k^(i-k)``.
    With ``check`` (log only) the result is verified to be the compositional
    inverse of the exp coefficients.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if which not in ("exp", "log"):
        raise ValueError("which must be 'exp' or 'log'")
    out = _coeffs(G, N, which)
    if check and which == "log":
        alpha = _coeffs(G, N, "exp")
        beta = _coeffs(G, N, "log")
        for n in range(1, N + 1):
            if not M.is_zero_matrix(composition_defect(alpha, beta, n)):
                raise MethodMismatch(f"Log coefficients fail to invert Exp in degree {n}")
    return out


def composition_defect(left: list[Matrix], right: list[Matrix], n: int, _forms: dict | None = None) -> Matrix:
    """``sum_{i+j=n} left_i right_j^(i)``.

    With ``(left, right) = (alpha, beta)`` this is the degree-n coefficient of
    ``Exp(Log(x))`` (zero for n >= 1); swapping gives ``Log(Exp(x))``.  All
    terms are brought to one denominator: each matrix is put over its own
    common denominator, so the products of one term share a denominator;
    their sum is then raised once to the overall target.  ``_forms`` caches
    the common forms between calls for different n.
    """
    F = left[0][0][0].F
    G = F.gf
    d = len(left[0])
    cache = {} if _forms is None else _forms

    def form(side: str, mats: list[Matrix], j: int):
        if (side, j) not in cache:
            cache[side, j] = common_form(mats[j])
        return cache[side, j]

    forms = []
    for i in range(n + 1):
        L, el = form("L", left, i)
        R, er = form("R", right, n - i)
        if i:
            qi = F.q**i
            R = [[AlgCoeff(F, x).twist(i).c for x in row] for row in R]
            er = {j: e * qi for j, e in er.items()}
        tot = dict(el)
        for j, e in er.items():
            tot[j] = tot.get(j, 0) + e
        forms.append((L, R, tot))
    T: dict[int, int] = {}
    for _, _, tot in forms:
        for j, e in tot.items():
            if T.get(j, 0) < e:
                T[j] = e
    acc = [[[] for _ in range(d)] for _ in range(d)]
    for L, R, tot in forms:
        delta = tuple(sorted((j, e - tot.get(j, 0)) for j, e in T.items() if e != tot.get(j, 0)))
        LR = P.matmul(G, L, R)
        for r in range(d):
            for c in range(d):
                if LR[r][c].shape[1]:
                    acc[r][c].append(raise_planes(F, LR[r][c], delta))
    out = []
    for r in range(d):
        row = []
        for c in range(d):
            if acc[r][c]:
                num = AlgCoeff(F, P.trim(_plane_sum(F, acc[r][c])))
                row.append(CFrac(num, T.items()))
            else:
                row.append(CFrac.zero(F))
        out.append(row)
    return out


def composition_defects(left: list[Matrix], right: list[Matrix], nmax: int) -> list[Matrix]:
    """``composition_defect`` for n = 0..nmax, sharing the common forms."""
    cache: dict = {}
    return [composition_defect(left, right, n, cache) for n in range(nmax + 1)]


# ---------------------------------------------------------------------------
# evaluation


def _vec_target(F: FieldParams, z: Sequence[LaurentApprox], prec) -> int:
    p = F.prec if prec is None else prec
    return int(min([p] + [x.prec for x in z]))


def _vector_series(coeff_at, z: Sequence[LaurentApprox], target: int, N: int | None, cap: int, monotone: bool):
    """Sum ``C_i z^(q^i)`` (matrix coefficients); per-coordinate error floors.

    Returns (vector, per-term minimal orders)."""
    F = z[0].F
    d = len(z)
    acc = [LaurentApprox.zero(F, target) for _ in range(d)]
    orders: list = []
    last = None
    i = 0
    tails = [INF] * d
    while True:
        C = coeff_at(i)
        zi = [x.twist(i) for x in z]
        row_ord = []
        for k in range(len(C)):
            o = INF
            for j in range(d):
                if not C[k][j].is_zero() and not zi[j].is_zero():
                    o = min(o, C[k][j].valuation() + zi[j].valuation())
            row_ord.append(o)
        o_all = min(row_ord) if row_ord else INF
        orders.append(o_all)
        if N is not None:
            if i == N + 1:
                tails = row_ord
                break
        elif o_all != INF and o_all >= target and last is not None and o_all > last:
            tails = row_ord
            break
        elif i >= cap:
            raise ConvergenceUncertified(f"series did not reach precision {target} in {cap} terms")
        if o_all < target:
            for k in range(len(C)):
                if row_ord[k] >= target:
                    continue
                for j in range(d):
                    c = C[k][j]
                    if c.is_zero() or zi[j].is_zero():
                        continue
                    acc[k] = acc[k] + c.embed(target - zi[j].valuation()) * zi[j]
        if o_all != INF:
            last = o_all
        i += 1
    out = [a.truncate(min(target, t)) for a, t in zip(acc, tails)]
    return out, orders


def evaluate_tmodule(
    G: TModuleDef,
    which: str,
    z: Sequence,
    N: int | None = None,
    a: Sequence[int] | None = None,
    prec: int | None = None,
) -> list:
    """``Exp_G(z)``, ``Log_G(z)`` or ``phi(a)(z)`` (which = 'action').

    Series are summed as in the Drinfeld case; for ``log`` the term orders
    over the final third of the computed indices must strictly increase.
    The action is exact on exact (AlgCoeff) inputs.
    """
    F = G.F
    if len(z) != G.d:
        raise ValueError("vector length does not match the dimension")
    if which == "action":
        P = G.phi_of([0, 1] if a is None else a)
        if all(isinstance(x, AlgCoeff) for x in z):
            return P.apply(list(z))
        Pl = P.map_entries(alg_embed)
        return Pl.apply([x if isinstance(x, LaurentApprox) else alg_embed(x) for x in z])
    if which not in ("exp", "log"):
        raise ValueError("which must be exp, log or action")
    z = [x if isinstance(x, LaurentApprox) else alg_embed(x) for x in z]
    target = _vec_target(F, z, prec)
    if all(x.is_zero() for x in z):
        return [LaurentApprox.zero(F, target) for _ in z]

    def coeff_at(i):
        return exp_log_coeffs_matrix(G, i, which)[i]

    value, orders = _vector_series(coeff_at, z, target, N, term_cap(F, target, G.m) + G.d, which == "log")
    if which == "log":
        finite = [o for o in orders if o != INF]  # exactly vanishing terms carry no norm
        w = max(2, math.ceil((len(finite) - 1) / 3))
        window = finite[len(finite) - w :]
        if not all(b > a_ for a_, b in zip(window, window[1:])):
            raise ConvergenceUncertified("log terms are not certified to be decreasing in norm")
    return value


# ---------------------------------------------------------------------------
# Anderson generating functions


def _apply_A0_inv(G: TModuleDef, y: list[LaurentApprox]) -> list[LaurentApprox]:
    """``A_0^(-1) y = theta^(-1) sum_k (-N/theta)^k y`` (a finite sum)."""
    F = G.F
    Nsp = _sparse_N(G)
    tinv = LaurentApprox.theta(F).inverse()
    term = [x * tinv for x in y]
    out = list(term)
    for _ in range(G.d):
        nxt = [LaurentApprox.zero(F) for _ in range(G.d)]
        for i, j, c in Nsp:
            nxt[i] = nxt[i] - term[j].scale(c)
        term = [x * tinv for x in nxt]
        if all(x.is_zero() and x.prec == INF for x in term):
            break
        out = [a + b for a, b in zip(out, term)]
    return out


def _base_prec(F: FieldParams, w: Sequence[LaurentApprox]) -> int:
    return int(min([F.prec] if all(x.prec == INF for x in w) else [x.prec for x in w if x.prec != INF]))


def _agf_definitional(G: TModuleDef, w: list[LaurentApprox], D: int) -> list[TateSeries]:
    F = G.F
    Pw = _base_prec(F, w)
    cols: list[list[LaurentApprox]] = []
    y = w
    for i in range(D + 1):
        y = _apply_A0_inv(G, y)
        P_i = Pw + F.E * (i + 1)
        y = [x.truncate(P_i) for x in y]
        cols.append(evaluate_tmodule(G, "exp", y, prec=P_i))
    return [TateSeries(F, [cols[i][k] for i in range(D + 1)], D) for k in range(G.d)]


def _agf_recursive(G: TModuleDef, w: list[LaurentApprox], D: int) -> list[TateSeries]:
    """``sum_k alpha_k ((A_0 - t)^(-1))^(k) w^(k)`` with
    ``((A_0 - t)^(-1))^(k) = sum_j (-N)^j (theta^(q^k) - t)^(-j-1)``."""
    F = G.F
    d = G.d
    Pw = _base_prec(F, w)
    targets = [Pw + F.E * (i + 1) for i in range(D + 1)]
    acc = [[LaurentApprox.zero(F, t) for t in targets] for _ in range(d)]
    Nsp = _sparse_N(G)
    wmin = min(x.valuation() for x in w)
    prev = None
    k = 0
    cap = term_cap(F, max(targets), G.m) + d + 8
    while True:
        alpha = exp_log_coeffs_matrix(G, k, "exp")[k]
        a_ord = min((x.valuation() for row in alpha for x in row if not x.is_zero()), default=INF)
        if a_ord == INF:  # a vanishing coefficient says nothing about convergence
            if k > cap:
                raise PrecisionExhausted("vector AGF series did not settle")
            k += 1
            continue
        low = a_ord + F.q**k * (wmin + F.E)
        margins = [a_ord + F.q**k * (wmin + F.E * (i + 1)) - t for i, t in enumerate(targets)]
        if min(margins) >= 0 and prev is not None and low > prev and k >= 1:
            break
        if k > cap:
            raise PrecisionExhausted("vector AGF series did not settle")
        wk = [x.twist(k) for x in w]
        theta_k = LaurentApprox.theta(F) ** (F.q**k)
        need = max(t - F.E * F.q**k * (i + 1) for i, t in enumerate(targets))
        # u_j = alpha_k (-N)^j w^(k), j = 0..d-1
        u = wk
        for j in range(d):
            if all(x.is_zero() and x.prec == INF for x in u):
                break
            vec = []
            for r_ in range(d):
                s = LaurentApprox.zero(F, need)
                for c_ in range(d):
                    a = alpha[r_][c_]
                    if a.is_zero() or u[c_].is_zero():
                        continue
                    s = s + a.embed(need - u[c_].valuation()) * u[c_]
                vec.append(s)
            geo = geometric_inverse(F, theta_k, D, power=j + 1)
            for r_ in range(d):
                if vec[r_].is_zero() and vec[r_].prec >= need:
                    continue
                for i in range(D + 1):
                    acc[r_][i] = acc[r_][i] + (vec[r_] * geo.coeffs[i]).truncate(targets[i])
            nxt = [LaurentApprox.zero(F) for _ in range(d)]
            for i_, j_, c in Nsp:
                nxt[i_] = nxt[i_] - u[j_].scale(c)
            u = nxt
        prev = low
        k += 1
    return [TateSeries(F, acc[r_], D) for r_ in range(d)]


def agf_tmodule(G: TModuleDef, w: Sequence[LaurentApprox], D: int, check: bool = True) -> list[TateSeries]:
    """Vector AGF ``sum_i Exp_G(A_0^(-i-1) w) t^i``; cross-checked against the series form."""
    if D < 0:
        raise ValueError("D must be >= 0")
    F = G.F
    w = [x if isinstance(x, LaurentApprox) else alg_embed(x) for x in w]
    if all(x.is_zero() for x in w):
        Pw = _base_prec(F, w)
        return [TateSeries(F, [LaurentApprox.zero(F, Pw + F.E * (i + 1)) for i in range(D + 1)], D) for _ in w]
    f = _agf_definitional(G, w, D)
    if check:
        g = _agf_recursive(G, w, D)
        for k, (a, b) in enumerate(zip(f, g)):
            for i, (x, y) in enumerate(zip(a.coeffs, b.coeffs)):
                if not x.agrees(y):
                    raise MethodMismatch(f"AGF coordinate {k}, t^{i}: definition and series expansion disagree")
    return f


# ---------------------------------------------------------------------------
# almost strict purity


def asp_top_coeff(G: TModuleDef) -> tuple[bool, Matrix]:
    """Top tau-coefficient of ``phi(t^d)``; True iff it is invertible and lower triangular."""
    T = G.phi_t() ** G.d
    top = T.coeffs[-1]
    d = G.d
    lower = all(top[i][j].is_zero() for i in range(d) for j in range(i + 1, d))
    invertible = lower and all(not top[i][i].is_zero() for i in range(d))
    return invertible, top


# ---------------------------------------------------------------------------
# tangent maps of endomorphisms


def _as_tpoly(F: FieldParams, x) -> TateSeries:
    if isinstance(x, TateSeries):
        if not x.is_poly():
            raise ValueError("endomorphism matrices must have polynomial entries in t")
        return x
    return TateSeries.const(F, AlgFrac.of(x, F))


def _tmat_mul(F: FieldParams, A: Matrix, B: Matrix) -> Matrix:
    zero = TateSeries.zero(F)
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), zero) for j in range(len(B[0]))] for i in range(len(A))]


def _at_theta(f: TateSeries) -> AlgFrac:
    """Exact value of a polynomial in t at t = theta (Horner)."""
    F = f.F
    th = AlgFrac.theta(F)
    acc = AlgFrac.zero(F)
    for c in reversed(f.coeffs):
        acc = acc * th + AlgFrac.of(c, F)
    return acc


def change_of_basis(phi: DrinfeldModule, flavor: str) -> tuple[Matrix, Matrix]:
    """(B, B^{-1}) for E_n (without the scalar gamma^(1), which cancels in
    conjugation) or (B^tens, (B^tens)^{-1}) for G_n; entries are AlgFrac.

    Needs negative twists of the coefficients a_i, i.e. enough w-roots in
    the coefficient ring (s >= r - 1 suffices)."""
    F, r = phi.F, phi.r
    a = [None] + [AlgFrac.of(x, F) for x in phi.a]  # a[1..r]
    zero, one = AlgFrac.zero(F), AlgFrac.one(F)
    if flavor == "En":
        B = [[zero] * r for _ in range(r)]
        B[0][0] = one
        for i in range(1, r):  # 0-based row i carries twist -i
            for j in range(i, r):
                B[i][j] = a[r - (j - i)].twist(-i)
        return B, M.inverse_field(B, zero, one)
    if flavor == "Gn":
        Binv = [[zero] * r for _ in range(r)]
        Binv[r - 1][0] = one
        for i in range(r - 1):  # row i: a_{i+2}^{(-1)}, a_{i+3}^{(-2)}, ...
            for j in range(1, r - i):
                Binv[i][j] = a[i + j + 1].twist(-j)
        return M.inverse_field(Binv, zero, one), Binv
    raise ValueError("flavor must be En or Gn")


def build_dP(Fmat: Matrix, phi: DrinfeldModule, n: int, flavor: str) -> Matrix:
    """Tangent matrix of the endomorphism of E_n / G_n induced by an
    endomorphism of phi with motive matrix ``Fmat`` (r x r, polynomial in t).

    E_n: T = B^{-1} F^tr B, S' = T without its first column; the first block
    row is [(T')^tr, d^1(S')^tr, ..., d^n(S')^tr] and block row k >= 1 holds
    d^{j-k}(T)^tr in block column j.  G_n: Q = (B^tens)^{-1} F B^tens, S its
    last row; first block row [Q_rr, d^1(S)^tr, ..., d^n(S)^tr], then
    d^{j-k}(Q)^tr.  Everything is evaluated at t = theta.
    """
    F, r = phi.F, phi.r
    if len(Fmat) != r or any(len(row) != r for row in Fmat):
        raise ValueError("the endomorphism matrix must be r x r")
    Ft = [[_as_tpoly(F, x) for x in row] for row in Fmat]
    B, Binv = change_of_basis(phi, flavor)
    Bt = M.mat_map(B, lambda x: TateSeries.const(F, x))
    Binvt = M.mat_map(Binv, lambda x: TateSeries.const(F, x))
    if flavor == "En":
        if n < 0:
            raise ValueError("n must be >= 0")
        T = _tmat_mul(F, _tmat_mul(F, Binvt, M.transpose(Ft)), Bt)
        first_cols = list(range(1, r))
        corner = [[T[j][i] for j in first_cols] for i in first_cols]  # (T')^tr
        top = [[T[j][i] for j in range(r)] for i in first_cols]  # (S')^tr
    elif flavor == "Gn":
        if n < 1:
            raise ValueError("n must be >= 1")
        T = _tmat_mul(F, _tmat_mul(F, Binvt, Ft), Bt)
        corner = [[T[r - 1][r - 1]]]
        top = [[T[r - 1][j] for j in range(r)]]  # S^tr
    else:
        raise ValueError("flavor must be En or Gn")
    Ttr = M.transpose(T)
    h = len(corner)
    d = h + r * n
    zero = AlgFrac.zero(F)
    out = [[zero] * d for _ in range(d)]

    def put(row0: int, col0: int, blk: Matrix, k: int) -> None:
        for i, row in enumerate(blk):
            for j, f in enumerate(row):
                out[row0 + i][col0 + j] = _at_theta(hyperderivative(f, k))

    put(0, 0, corner, 0)
    for j in range(1, n + 1):
        put(0, h + r * (j - 1), top, j)
    for k in range(1, n + 1):
        for j in range(k, n + 1):
            put(h + r * (k - 1), h + r * (j - 1), Ttr, j - k)
    return out


def dP_commutes(G: TModuleDef, dP: Matrix) -> bool:
    """``dP A_0 = A_0 dP`` (the tangent map of an endomorphism commutes with d phi(t))."""
    A0 = M.mat_map(G.A(0), lambda x: AlgFrac.of(x, G.F))
    zero = AlgFrac.zero(G.F)
    return M.equal(M.mul(dP, A0, zero), M.mul(A0, dP, zero))
