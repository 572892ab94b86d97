"""Drinfeld modules ``phi(t) = theta + a_1 tau + ... + a_r tau^r``.

Exact Exp/Log coefficients (as :class:`~anderson_forge.cfrac.CFrac`), their
evaluation on Laurent series with ultrametric error control, Anderson
generating functions by two independent routes, quasi-logarithms, the period
matrix with its Legendre ratio, a rank-2 CM fixture with exactly known
periods, and Carlitz polylogarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import matrix as M
from .algebra import AlgCoeff
from .cfrac import CFrac, descend
from .errors import (
    ConvergenceUncertified,
    FixtureVerificationFailed,
    MethodMismatch,
    OutsideConvergenceDomain,
    ParseError,
    PrecisionExhausted,
)
from .ff import FieldParams
from .laurent import INF, LaurentApprox, alg_embed
from .skew import TauMatrix
from .tate import TateSeries, carlitz_period, geometric_inverse, tate_eval


@dataclass(frozen=True)
class DrinfeldModule:
    """``phi(t) = theta + sum_i a[i-1] tau^i`` over the ring of ``F``."""

    F: FieldParams
    a: tuple[AlgCoeff, ...]

    def __post_init__(self):
        a = tuple(AlgCoeff.from_int(self.F, x) if isinstance(x, int) else x for x in self.a)
        object.__setattr__(self, "a", a)
        if not a or a[-1].is_zero():
            raise ValueError("a Drinfeld module needs a nonzero leading coefficient a_r")
        if any(x.F.key != self.F.key for x in a):
            raise ValueError("coefficients live in a different ring")

    @classmethod
    def carlitz(cls, F: FieldParams) -> "DrinfeldModule":
        return cls(F, (AlgCoeff.one(F),))

    @property
    def r(self) -> int:
        return len(self.a)

    @property
    def key(self) -> tuple:
        return (self.F.key, tuple(x.c.tobytes() + bytes(str(x.c.shape), "ascii") for x in self.a))

    def __hash__(self) -> int:
        return hash(self.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, DrinfeldModule) and self.F.key == other.F.key and self.a == other.a

    def phi_t(self) -> TauMatrix:
        F = self.F
        return TauMatrix([[[AlgCoeff.theta(F)]]] + [[[x]] for x in self.a])

    def apply(self, x: LaurentApprox) -> LaurentApprox:
        """phi(t)(x) = theta x + sum a_i x^(q^i)."""
        F = self.F
        out = LaurentApprox.theta(F) * x
        for i, a in enumerate(self.a, start=1):
            out = out + alg_embed(a) * x.twist(i)
        return out

    def to_json(self) -> dict:
        return {"r": self.r, "a": [x.to_json() for x in self.a]}

    @classmethod
    def from_json(cls, obj: dict, F: FieldParams | None = None) -> "DrinfeldModule":
        try:
            a = tuple(AlgCoeff.from_json(x, F) for x in obj["a"])
            r = int(obj["r"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed Drinfeld module JSON: {exc}") from exc
        if r != len(a) or not a:
            raise ParseError("rank does not match the number of coefficients")
        return cls(a[0].F, a)


# ---------------------------------------------------------------------------
# exact coefficients

_COEFF_CACHE: dict[tuple, list[CFrac]] = {}


def _work_ring(phi: DrinfeldModule) -> tuple[FieldParams, list[AlgCoeff]]:
    """Descend to the ``s = 0`` ring when all a_i lie in F_{q^m}[theta]."""
    low = [descend(a) for a in phi.a]
    if all(x is not None for x in low):
        return phi.F.with_(s=0), low  # type: ignore[return-value]
    return phi.F, list(phi.a)


def _compute(phi: DrinfeldModule, N: int, which: str) -> list[CFrac]:
    key = (phi.key, which)
    F0, a = _work_ring(phi)
    if key not in _COEFF_CACHE and len(_COEFF_CACHE) >= 256:
        _COEFF_CACHE.clear()
    cache = _COEFF_CACHE.setdefault(key, [CFrac.one(F0)])
    ac = [CFrac(x) for x in a]
    r = len(ac)
    for i in range(len(cache), N + 1):
        acc = CFrac.zero(F0)
        for j in range(1, min(i, r) + 1):
            if which == "exp":
                acc = acc + ac[j - 1] * cache[i - j].twist(j)
            else:
                acc = acc + cache[i - j] * ac[j - 1].twist(i - j)
        if which == "log":
            acc = -acc
        cache.append(acc.div_c(i))
    out = cache[: N + 1]
    if F0 is not phi.F:
        out = [c.lift(phi.F) for c in out]
    return out


def exp_log_coeffs(phi: DrinfeldModule, N: int, which: str = "exp") -> list[CFrac]:
    """``e_0..e_N`` (exp) or ``l_0..l_N`` (log), exact.

    ``e_i (theta^(q^i) - theta) = sum_j a_j e_{i-j}^(q^j)`` and
    ``l_i (theta - theta^(q^i)) = sum_j l_{i-j} a_j^(q^(i-j))``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if which not in ("exp", "log"):
        raise ValueError("which must be 'exp' or 'log'")
    return _compute(phi, N, which)


def _coeff(phi: DrinfeldModule, i: int, which: str) -> CFrac:
    return exp_log_coeffs(phi, i, which)[i]


# ---------------------------------------------------------------------------
# evaluation


def _target(F: FieldParams, z: LaurentApprox, prec) -> int:
    p = F.prec if prec is None else prec
    return int(min(p, z.prec))


def _series_sum(coeff_at, z: LaurentApprox, target: int, N: int | None, max_terms: int):
    """Sum ``c_i z^(q^i)`` for i = 0, 1, ...; returns (value, term orders).

    ``coeff_at(i)`` returns a CFrac or ``None`` (an exactly vanishing term).
    With ``N`` given, terms ``0..N`` are summed and the order of term ``N+1``
    bounds the error.  Otherwise summation stops at the first term that lies
    at or above ``target`` while the term orders are increasing; its order is
    the error bound.
    """
    F = z.F
    acc = LaurentApprox.zero(F, target)
    orders: list = []
    last_finite = None
    i = 0
    while True:
        c = coeff_at(i)
        o = INF if c is None or c.is_zero() else c.valuation() + F.q**i * z.valuation()
        orders.append(o)
        if N is not None:
            if i == N + 1:
                tail = o
                break
        elif o != INF and o >= target and last_finite is not None and o > last_finite:
            tail = o
            break
        elif i >= max_terms:
            raise ConvergenceUncertified(f"series did not reach precision {target} in {max_terms} terms")
        if o < target:
            zi = z.twist(i)
            acc = acc + c.embed(target - zi.valuation()) * zi
        if o != INF:
            last_finite = o
        i += 1
    return acc.truncate(min(target, tail)), orders


def term_cap(F: FieldParams, target: int, r: int = 1) -> int:
    """Largest index tried before giving up: coefficient sizes grow like q^i,
    and a convergent series needs about log_q(target) terms."""
    return r + 4 + math.ceil(math.log(8 * max(abs(target), 2) + 1, F.q))


def eval_exp_log(
    phi: DrinfeldModule, which: str, z: LaurentApprox, N: int | None = None, prec: int | None = None
) -> LaurentApprox:
    """Exp_phi(z) or Log_phi(z) as a partial sum with ultrametric error control.

    With ``N`` given, terms ``0..N`` are summed and the result's precision is
    the order of term ``N+1``.  Log additionally requires the term orders over
    the final third of the computed indices to be strictly increasing.
    """
    F = phi.F
    target = _target(F, z, prec)
    if z.is_zero():
        return LaurentApprox.zero(F, target)

    def coeff_at(i):
        return _coeff(phi, i, which)

    value, orders = _series_sum(coeff_at, z, target, N, max_terms=term_cap(F, target, phi.r))
    if which == "log":
        finite = [o for o in orders if o != INF]  # exactly vanishing terms carry no norm
        w = max(2, math.ceil((len(finite) - 1) / 3))
        window = finite[len(finite) - w :]
        if not all(b > a for a, b in zip(window, window[1:])):
            raise ConvergenceUncertified("log terms are not certified to be decreasing in norm")
    return value


def exp_phi(phi: DrinfeldModule, z: LaurentApprox, prec: int | None = None) -> LaurentApprox:
    return eval_exp_log(phi, "exp", z, prec=prec)


def log_phi(phi: DrinfeldModule, z: LaurentApprox, prec: int | None = None) -> LaurentApprox:
    return eval_exp_log(phi, "log", z, prec=prec)


# ---------------------------------------------------------------------------
# Anderson generating functions


def _base_prec(F: FieldParams, w: LaurentApprox) -> int:
    """Absolute precision carried by ``w`` (the field precision if exact)."""
    return int(F.prec if w.prec == INF else w.prec)


def _agf_definitional(phi: DrinfeldModule, w: LaurentApprox, D: int) -> TateSeries:
    F = phi.F
    Pw = _base_prec(F, w)
    coeffs = []
    for i in range(D + 1):
        x = w.shift(F.E * (i + 1))
        if F.p != 2 and (i + 1) % 2:
            x = -x  # theta^-(i+1) = (-1)^(i+1) v^(E(i+1))
        coeffs.append(exp_phi(phi, x.truncate(Pw + F.E * (i + 1)), prec=Pw + F.E * (i + 1)))
    return TateSeries(F, coeffs, D)


def _agf_recursive(phi: DrinfeldModule, w: LaurentApprox, D: int) -> TateSeries:
    """``sum_k e_k w^(q^k) (theta^(q^k) - t)^(-1)``, summed until every coefficient is settled."""
    F = phi.F
    Pw = _base_prec(F, w)
    targets = [Pw + F.E * (i + 1) for i in range(D + 1)]
    acc = [LaurentApprox.zero(F, t) for t in targets]
    prev = None
    k = 0
    while True:
        e = _coeff(phi, k, "exp")
        if e.is_zero():  # vanishing coefficients say nothing about convergence
            k += 1
            continue
        wk = w.twist(k)
        # order of the contribution to coefficient i: ord(e_k) + q^k (ord w + E (i+1))
        lows = [e.valuation() + F.q**k * (w.valuation() + F.E * (i + 1)) for i in range(D + 1)]
        margin = min(lo - t for lo, t in zip(lows, targets))
        if margin >= 0 and prev is not None and lows[0] > prev and k >= 1:
            break
        if k > 64:
            raise PrecisionExhausted("AGF series did not settle")
        need = max(t - F.E * F.q**k * (i + 1) for i, t in enumerate(targets))
        xk = e.embed(need - wk.valuation()) * wk
        theta_k = LaurentApprox.theta(F) ** (F.q**k)
        geo = geometric_inverse(F, theta_k, D)
        for i in range(D + 1):
            acc[i] = acc[i] + (xk * geo.coeffs[i]).truncate(targets[i])
        prev = lows[0]
        k += 1
    return TateSeries(F, acc, D)


def agf_drinfeld(phi: DrinfeldModule, w: LaurentApprox, D: int, check: bool = True) -> TateSeries:
    """Anderson generating function ``f_w(t) = sum_i Exp_phi(w / theta^(i+1)) t^i``.

    Computed from the definition; with ``check`` it is also computed as
    ``sum_k e_k ((theta - t)^(-1))^(k) w^(k)`` and the two must agree.
    """
    if D < 0:
        raise ValueError("D must be >= 0")
    F = phi.F
    if w.is_zero():
        return TateSeries(F, [LaurentApprox.zero(F, w.prec + F.E * (i + 1)) for i in range(D + 1)], D)
    f = _agf_definitional(phi, w, D)
    if check:
        g = _agf_recursive(phi, w, D)
        for i, (a, b) in enumerate(zip(f.coeffs, g.coeffs)):
            if not a.agrees(b):
                raise MethodMismatch(f"AGF coefficient {i}: definition and series expansion disagree")
    return f


# ---------------------------------------------------------------------------
# quasi-logarithms


def _auto_degree(F: FieldParams, w: LaurentApprox, i: int, target: int) -> int:
    """t-degree after which the terms of f_w^(i)(theta) lie beyond ``target``."""
    qi = F.q**i
    lead = qi * (w.valuation() + F.E)
    slope = (qi - 1) * F.E
    return max(8, math.ceil((target - lead) / slope) + 4)


def quasilog(phi: DrinfeldModule, w: LaurentApprox, i: int, D: int | None = None) -> LaurentApprox:
    """``F_{phi, delta_i}(w)``: ``Exp(w) - w`` for i = 0, else ``f_w^(i)(theta)``."""
    F = phi.F
    if not 0 <= i < max(phi.r, 1):
        raise ValueError("i must lie in 0..r-1")
    if i == 0:
        return exp_phi(phi, w) - w
    target = _base_prec(F, w)
    if w.is_zero():
        return LaurentApprox.zero(F, target)
    if D is None:
        D = _auto_degree(F, w, i, target)
    f = agf_drinfeld(phi, w, D, check=False)
    return tate_eval(f.twist(i), LaurentApprox.theta(F))


def quasilog_series(phi: DrinfeldModule, w: LaurentApprox, i: int, prec: int | None = None) -> LaurentApprox:
    """Independent route: the power series ``F = sum_{h>=1} c_h z^(q^h)`` solving
    ``F(theta z) = theta F(z) + delta_i(t)(Exp(z))`` coefficient by coefficient.

    For i >= 1 (``delta_i(t) = tau^i``): ``c_h = e_{h-i}^(q^i) / (theta^(q^h) - theta)``;
    for i = 0 (``delta_0(t) = phi(t) - theta``):
    ``c_h = sum_j a_j e_{h-j}^(q^j) / (theta^(q^h) - theta)``.
    """
    if not 0 <= i < max(phi.r, 1):
        raise ValueError("i must lie in 0..r-1")
    F = phi.F
    target = _target(F, w, prec if prec is not None else _base_prec(F, w))
    a = [CFrac(x) for x in phi.a]

    def coeff_at(h):
        if h < max(i, 1):
            return None
        if i:
            return _coeff(phi, h - i, "exp").twist(i).div_c(h)
        acc = CFrac.zero(F)
        for j in range(1, min(h, phi.r) + 1):
            acc = acc + a[j - 1] * _coeff(phi, h - j, "exp").twist(j)
        return acc.div_c(h)

    value, _ = _series_sum(coeff_at, w, target, None, max_terms=term_cap(F, target, phi.r) + i)
    return value


# ---------------------------------------------------------------------------
# periods


@dataclass
class PeriodBasis:
    """A basis of the period lattice; each element is checked to satisfy Exp(lambda) ~ 0."""

    phi: DrinfeldModule
    periods: tuple[LaurentApprox, ...]
    provenance: str = "user-supplied"
    residues: tuple[LaurentApprox, ...] = field(default=(), init=False)

    def __post_init__(self):
        if len(self.periods) != self.phi.r:
            raise ValueError("a period basis has exactly r elements")
        res = tuple(exp_phi(self.phi, lam) for lam in self.periods)
        for j, e in enumerate(res):
            if not e.is_zero():
                raise FixtureVerificationFailed(
                    f"Exp(lambda_{j + 1}) has order {e.valuation()} below its precision {e.prec}"
                )
        self.residues = res


@dataclass
class PeriodMatrix:
    P: list[list[LaurentApprox]]
    det: LaurentApprox
    ratio: LaurentApprox
    reconstruction: tuple[list[int], list[int]] | None


def period_matrix(phi: DrinfeldModule, basis: PeriodBasis, D: int | None = None, max_deg: int = 4) -> PeriodMatrix:
    """Rows ``[-lambda_j, F_{delta_1}(lambda_j), ..., F_{delta_{r-1}}(lambda_j)]``,
    ``det``, the ratio ``pi~ / det`` and a rational-reconstruction attempt."""
    F = phi.F
    rows = []
    for lam in basis.periods:
        rows.append([-lam] + [quasilog(phi, lam, i, D) for i in range(1, phi.r)])
    det = M.det(rows)
    ratio = carlitz_period(F).div(det)
    rec = rational_reconstruct(ratio, max_deg)
    return PeriodMatrix(rows, det, ratio, rec)


def rational_reconstruct(x: LaurentApprox, max_deg: int = 4, subfield: int | None = 2):
    """Try to write ``x = P(theta)/Q(theta)`` with deg P, Q <= max_deg and (optionally)
    coefficients in ``F_{q^subfield}``; returns ``(P codes, Q codes)`` or ``None``.

    Elements of F_{q^m}(theta) expand in powers of ``u = 1/theta = -v^E``; a
    Pade system in u of order ``2 max_deg + 1`` plus all remaining known
    coefficients as a consistency check decides the attempt.
    """
    F = x.F
    G = F.gf
    if x.is_zero():
        return None
    E = F.E
    # require support on multiples of E
    if any(e % E for e, _ in x.terms()):
        return None
    u_low = x.valuation() // E
    n_known = (x.prec - x.valuation()) // E if x.prec != INF else 4 * max_deg + 4
    if n_known < 2 * max_deg + 2:
        return None
    # coefficient of u^(u_low + k): v^(E (u_low+k)) = (-1)^(u_low+k) u^(u_low+k)
    def ucoef(k):
        e = E * (u_low + k)
        c = x.coeff(e)
        return G.neg(c) if (u_low + k) % 2 and F.p != 2 else c

    ser = [ucoef(k) for k in range(n_known)]
    # unknowns: Q_0..Q_B, and x*Q must be a polynomial in theta = 1/u: x*Q = u^(u_low) * S(u),
    # P(theta) = theta^B' ... use the standard form x = P(u)/Q(u) * u^(u_low) in u.
    B = max_deg
    for deg in range(0, B + 1):
        # solve for Q (deg+1 unknowns, Q_0 = 1) so that coefficients deg+1 .. 2deg of S*Q vanish
        rows, rhs = [], []
        for k in range(deg + 1, 2 * deg + 1):
            rows.append([ser[k - j] if 0 <= k - j < len(ser) else 0 for j in range(1, deg + 1)])
            rhs.append(G.neg(ser[k]))
        sol = _solve(G, rows, rhs, deg)
        if sol is None:
            continue
        Q = [1] + sol
        Pp = []
        for k in range(deg + 1):
            acc = 0
            for j in range(0, k + 1):
                if j < len(Q):
                    acc = G.add(acc, G.mul(Q[j], ser[k - j]))
            Pp.append(acc)
        ok = True
        for k in range(deg + 1, n_known):
            acc = 0
            for j in range(len(Q)):
                if 0 <= k - j < len(ser):
                    acc = G.add(acc, G.mul(Q[j], ser[k - j]))
            if acc:
                ok = False
                break
        if not ok:
            continue
        if subfield is not None and F.m % subfield == 0:
            Qs = F.q**subfield
            if any(G.pow(c, Qs) != c for c in Q + Pp):
                continue
        return Pp, Q
    return None


def _solve(G, rows, rhs, n):
    """Solve a small linear system over GF (any solution) or None."""
    if n == 0:
        return [] if all(r == 0 for r in rhs) else None
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    ri = 0
    for c in range(n):
        p = next((i for i in range(ri, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[ri], A[p] = A[p], A[ri]
        inv = G.inv(A[ri][c])
        A[ri] = [G.mul(inv, x) for x in A[ri]]
        for i in range(len(A)):
            if i != ri and A[i][c]:
                f = A[i][c]
                A[i] = [G.sub(x, G.mul(f, y)) for x, y in zip(A[i], A[ri])]
        piv_cols.append(c)
        ri += 1
    for i in range(ri, len(A)):
        if A[i][n]:
            return None
    sol = [0] * n
    for i, c in enumerate(piv_cols):
        sol[c] = A[i][n]
    return sol


def _primitive(F: FieldParams) -> int:
    G = F.gf
    return G.p if G.k > 1 else _prime_root(G.p)


def _prime_root(p: int) -> int:
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in _prime_factors(p - 1)):
            return g
    return 1


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def cm_fixture(F: FieldParams) -> tuple[DrinfeldModule, PeriodBasis]:
    """``phi(t) = theta + tau^2`` with periods ``pi~_2`` and ``eps pi~_2`` (Carlitz period for base q^2)."""
    if F.m % 2 or F.m < 2:
        raise ValueError("the CM fixture needs m even (F_{q^2} inside F_{q^m})")
    q2 = F.q**2
    phi = DrinfeldModule(F, (AlgCoeff.zero(F), AlgCoeff.one(F)))
    pi2 = carlitz_period_base(F, q2)
    G = F.gf
    eps = G.pow(_primitive(F), (F.q**F.m - 1) // (q2 - 1))
    basis = PeriodBasis(phi, (pi2, pi2.scale(eps)), provenance="cm-fixture")
    return phi, basis


def carlitz_period_base(F: FieldParams, Q: int, prec: int | None = None) -> LaurentApprox:
    """``theta (-theta)^(1/(Q-1)) prod_i (1 - theta^(1-Q^i))^(-1)`` for Q a power of q with
    ``(Q-1) | E``; ``theta^(1-Q^i) = v^(E (Q^i - 1))``."""
    prec = F.prec if prec is None else prec
    if F.E % (Q - 1):
        raise ValueError("the uniformizer has no (Q-1)-th root of -theta")
    lead_ord = -F.E - F.E // (Q - 1)
    rel = prec - lead_ord
    if rel <= 0:
        raise PrecisionExhausted("precision below the order of the period")
    one = LaurentApprox.one(F)
    prod = one
    i = 1
    while F.E * (Q**i - 1) < rel:
        prod = prod * (one - LaurentApprox.monomial(F, F.E * (Q**i - 1))).inverse(rel)
        i += 1
    return (LaurentApprox.monomial(F, lead_ord, F.gf.neg(1)) * prod.truncate(rel)).truncate(prec)


# ---------------------------------------------------------------------------
# polylogarithms


def carlitz_polylog(alpha, n: int, prec: int | None = None) -> LaurentApprox:
    """``sum_{m>=0} alpha^(q^m) / L_m^n`` with ``L_m = prod_{j=1}^m (theta - theta^(q^j))``."""
    if isinstance(alpha, AlgCoeff):
        alpha = alg_embed(alpha)
    F = alpha.F
    if n < 1:
        raise ValueError("n must be >= 1")
    target = _target(F, alpha, prec)
    if alpha.is_zero():
        return LaurentApprox.zero(F, target)
    if -alpha.valuation() * (F.q - 1) >= n * F.q * F.E:
        raise OutsideConvergenceDomain("|alpha| must be < q^(nq/(q-1))")
    one = AlgCoeff.one(F)

    def coeff_at(m):
        c = CFrac(one, [(j, n) for j in range(1, m + 1)])
        return c.scale(F.gf.neg(1)) if (m * n) % 2 and F.p != 2 else c

    value, _ = _series_sum(coeff_at, alpha, target, None, max_terms=term_cap(F, target))
    return value


__all__ = [
    "DrinfeldModule",
    "PeriodBasis",
    "PeriodMatrix",
    "agf_drinfeld",
    "carlitz_period_base",
    "carlitz_polylog",
    "cm_fixture",
    "eval_exp_log",
    "exp_log_coeffs",
    "exp_phi",
    "log_phi",
    "period_matrix",
    "quasilog",
    "quasilog_series",
    "rational_reconstruct",
]
