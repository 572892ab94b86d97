"""Truncated Tate-algebra series in t, the Anderson-Thakur series Omega and the Carlitz period.

A :class:`TateSeries` stores coefficients ``c_0..c_D`` of ``sum c_i t^i``;
``trunc = D`` means the value is known modulo ``t^(D+1)``, ``trunc = None``
marks an exact polynomial in t.  Coefficients are exact (:class:`AlgFrac`)
or approximate (:class:`LaurentApprox`); mixed arithmetic promotes to the
approximate kind.  Twisting acts on coefficients only.
"""

from __future__ import annotations

import math
from math import comb
from typing import Sequence

from .algebra import AlgCoeff, AlgFrac, K
from .errors import DivisionByApparentZero, ParseError, PrecisionExhausted, TailNotDominated
from .ff import FieldParams
from .laurent import INF, LaurentApprox, embed

Coeff = "AlgFrac | LaurentApprox"


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _is_zero(c) -> bool:
    return c.is_zero()


class TateSeries:
    """Immutable truncated power series in t."""

    __slots__ = ("F", "coeffs", "trunc")

    def __init__(self, F: FieldParams, coeffs: Sequence, trunc: int | None = None):
        cs = [K(F, c) if isinstance(c, (int, AlgCoeff)) else c for c in coeffs]
        if trunc is not None:
            cs = cs[: trunc + 1]
        else:
            while cs and cs[-1].is_zero() and not (
                isinstance(cs[-1], LaurentApprox) and cs[-1].prec != INF
            ):
                cs.pop()
        self.F = F
        self.coeffs = tuple(cs)
        self.trunc = trunc

    # ------------------------------------------------------------ builders
    @classmethod
    def zero(cls, F: FieldParams, trunc: int | None = None) -> "TateSeries":
        return cls(F, [], trunc)

    @classmethod
    def const(cls, F: FieldParams, c, trunc: int | None = None) -> "TateSeries":
        return cls(F, [c], trunc)

    @classmethod
    def t(cls, F: FieldParams) -> "TateSeries":
        return cls(F, [AlgFrac.zero(F), AlgFrac.one(F)])

    @classmethod
    def t_minus_theta(cls, F: FieldParams) -> "TateSeries":
        return cls(F, [-AlgFrac.theta(F), AlgFrac.one(F)])

    # ------------------------------------------------------------ queries
    @property
    def kind(self) -> str:
        return "approx" if any(isinstance(c, LaurentApprox) for c in self.coeffs) else "exact"

    def coeff(self, i: int):
        if self.trunc is not None and i > self.trunc:
            raise PrecisionExhausted(f"t^{i} beyond truncation {self.trunc}")
        if i < len(self.coeffs):
            return self.coeffs[i]
        return AlgFrac.zero(self.F)

    def degree_bound(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_poly(self) -> bool:
        return self.trunc is None

    def gauss_ord(self):
        """min_i ord_v(c_i): the Gauss norm is q^(-gauss_ord/E)."""
        best = INF
        for c in self.coeffs:
            L = embed(c, self.F) if not isinstance(c, LaurentApprox) else c
            if L.n:
                best = min(best, L.lowest)
        return best

    def min_prec(self):
        """Worst absolute v-precision among stored coefficients."""
        best = INF
        for c in self.coeffs:
            if isinstance(c, LaurentApprox):
                best = min(best, c.prec)
        return best

    # ---------------------------------------------------------- arithmetic
    def _coerce(self, other) -> "TateSeries":
        if isinstance(other, TateSeries):
            return other
        if isinstance(other, (int, AlgCoeff, AlgFrac, LaurentApprox)):
            return TateSeries(self.F, [other])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        tr = _min_trunc(self.trunc, o.trunc)
        n = max(len(self.coeffs), len(o.coeffs))
        if tr is not None:
            n = min(n, tr + 1)
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else None
            b = o.coeffs[i] if i < len(o.coeffs) else None
            out.append(a if b is None else b if a is None else a + b)
        return TateSeries(self.F, out, tr)

    __radd__ = __add__

    def __neg__(self):
        return TateSeries(self.F, [-c for c in self.coeffs], self.trunc)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        tr = _min_trunc(self.trunc, o.trunc)
        na, nb = len(self.coeffs), len(o.coeffs)
        if na == 0 or nb == 0:
            return TateSeries(self.F, [], tr)
        n = na + nb - 1
        if tr is not None:
            n = min(n, tr + 1)
        out: list = [None] * n
        nzb = [(j, b) for j, b in enumerate(o.coeffs[:n]) if not _exact_zero(b)]
        for i, a in enumerate(self.coeffs[:n]):
            if _exact_zero(a):
                continue
            for j, b in nzb:
                k = i + j
                if k >= n:
                    break
                term = a * b
                out[k] = term if out[k] is None else out[k] + term
        # a slot that received no term only met exact zeros: it is exactly zero
        zero = AlgFrac.zero(self.F)
        return TateSeries(self.F, [zero if c is None else c for c in out], tr)

    __rmul__ = __mul__

    def scale(self, c) -> "TateSeries":
        return TateSeries(self.F, [c * x for x in self.coeffs], self.trunc)

    def shift_t(self, k: int) -> "TateSeries":
        """Multiply by t^k."""
        z = AlgFrac.zero(self.F)
        tr = None if self.trunc is None else self.trunc + k
        return TateSeries(self.F, [z] * k + list(self.coeffs), tr)

    def truncate(self, D: int) -> "TateSeries":
        if self.trunc is not None and D > self.trunc:
            raise PrecisionExhausted(f"cannot extend truncation {self.trunc} to {D}")
        cs = list(self.coeffs[: D + 1])
        return TateSeries(self.F, cs, D)

    def twist(self, j: int = 1) -> "TateSeries":
        return TateSeries(self.F, [c.twist(j) for c in self.coeffs], self.trunc)

    def map_coeffs(self, f) -> "TateSeries":
        return TateSeries(self.F, [f(c) for c in self.coeffs], self.trunc)

    def to_approx(self, prec=None) -> "TateSeries":
        p = self.F.prec if prec is None else prec
        return TateSeries(self.F, [embed(c, self.F, p) if not isinstance(c, LaurentApprox) else c for c in self.coeffs], self.trunc)

    def inverse(self, D: int | None = None, prec=None) -> "TateSeries":
        """Power-series inverse modulo t^(D+1); requires an invertible constant term."""
        if D is None:
            if self.trunc is None:
                raise PrecisionExhausted("inverse of a polynomial needs an explicit truncation")
            D = self.trunc
        elif self.trunc is not None:
            D = min(D, self.trunc)
        c0 = self.coeff(0)
        if c0.is_zero():
            raise DivisionByApparentZero("constant term of series is not invertible")
        inv0 = c0.inverse(prec) if isinstance(c0, LaurentApprox) else 1 / c0
        out = [inv0]
        for k in range(1, D + 1):
            acc = None
            for i in range(1, min(k, len(self.coeffs) - 1) + 1):
                a = self.coeffs[i]
                if _exact_zero(a):
                    continue
                term = a * out[k - i]
                acc = term if acc is None else acc + term
            if acc is None:
                out.append(AlgFrac.zero(self.F) if not isinstance(inv0, LaurentApprox) else inv0 * 0)
            else:
                out.append(-(acc * inv0))
        return TateSeries(self.F, out, D)

    # ----------------------------------------------------------- comparison
    def __eq__(self, other) -> bool:
        if not isinstance(other, TateSeries):
            return NotImplemented
        if self.trunc != other.trunc:
            return False
        n = max(len(self.coeffs), len(other.coeffs))
        return all(_coeff_eq(self._c(i), other._c(i)) for i in range(n))

    def _c(self, i):
        return self.coeffs[i] if i < len(self.coeffs) else AlgFrac.zero(self.F)

    def __hash__(self):
        return hash((self.trunc, len(self.coeffs)))

    def violation_ord(self, other: "TateSeries", D: int | None = None):
        """Smallest v-order of (self - other) over t-degrees <= D, and the
        certified floor (worst coefficient precision) over the same range."""
        d = self - other
        n = len(d.coeffs) if D is None else min(len(d.coeffs), D + 1)
        worst, floor = INF, INF
        for c in d.coeffs[:n]:
            L = c if isinstance(c, LaurentApprox) else embed(c, self.F, self.F.prec)
            worst = min(worst, L.valuation())
            floor = min(floor, L.prec)
        return worst, floor

    def __repr__(self) -> str:
        tail = "" if self.trunc is None else f" + O(t^{self.trunc + 1})"
        return f"TateSeries({len(self.coeffs)} coeffs{tail})"

    # ---------------------------------------------------------------- json
    def to_json(self) -> dict:
        return {
            "trunc": self.trunc,
            "kind": self.kind,
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict, F: FieldParams) -> "TateSeries":
        try:
            kind = obj["kind"]
            if kind not in ("exact", "approx"):
                raise ParseError(f"unknown TateSeries kind {kind!r}")
            if kind == "exact":
                cs = [AlgFrac.from_json(c, F) for c in obj["coeffs"]]
            else:
                cs = [LaurentApprox.from_json(c, F) for c in obj["coeffs"]]
            return cls(F, cs, obj["trunc"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed TateSeries JSON: {exc}") from exc


def _exact_zero(c) -> bool:
    if isinstance(c, LaurentApprox):
        return c.is_zero() and c.prec == INF
    return c.is_zero()


def _coeff_eq(a, b) -> bool:
    if isinstance(a, LaurentApprox) or isinstance(b, LaurentApprox):
        F = a.F
        La = a if isinstance(a, LaurentApprox) else embed(a, F)
        Lb = b if isinstance(b, LaurentApprox) else embed(b, F)
        return La == Lb
    return a == b


# ------------------------------------------------------------------ functions


def hyperderivative(f: TateSeries, j: int) -> TateSeries:
    """j-th hyperderivative: sum c_i C(i,j) t^(i-j), binomials mod p."""
    if j < 0:
        raise ValueError("hyperderivative order must be >= 0")
    if j == 0:
        return f
    p = f.F.p
    out = []
    for i in range(j, len(f.coeffs)):
        b = comb(i, j) % p
        c = f.coeffs[i]
        out.append(AlgFrac.zero(f.F) if b == 0 else c if b == 1 else c * b)
    tr = None if f.trunc is None else f.trunc - j
    if tr is not None and tr < 0:
        return TateSeries(f.F, [], 0)
    return TateSeries(f.F, out, tr)


def _tail_window(n: int) -> int:
    return max(3, n // 3)


def tate_eval(f: TateSeries, xi, floor=None) -> LaurentApprox:
    """Evaluate f at t = xi with a certified ultrametric error floor.

    For a truncated series the omitted tail is bounded through the envelope
    (largest term norm) of the final block of stored terms, which is
    accepted only if it is strictly below the envelope of the block before.  ``floor`` (optional) is the absolute
    precision the caller needs; failing it raises TailNotDominated.
    """
    F = f.F
    x = xi if isinstance(xi, LaurentApprox) else embed(xi, F)
    if x.n and x.lowest < -F.E:
        raise TailNotDominated("evaluation point lies outside the closed disk |t| <= q")
    acc = LaurentApprox.zero(F)
    power = LaurentApprox.one(F)
    nonzero = []  # (index, v-order) of terms with a known nonzero digit
    for i, c in enumerate(f.coeffs):
        if i:
            power = power * x
        if isinstance(c, LaurentApprox):
            cl = c
        elif c.is_zero():
            continue  # exact zero: contributes nothing, costs no precision
        else:
            # exact coefficient: embed deep enough that multiplying by x^i
            # still leaves the working precision intact
            base = F.prec if floor is None else max(floor, F.prec)
            cl = embed(c, F, base + max(0, -power.valuation()))
        term = cl * power
        if not term.is_zero():
            nonzero.append((i, term.valuation()))
        acc = acc + term
    if f.trunc is None:
        tail = INF
    else:
        n = f.trunc + 1
        w = _tail_window(n)
        # vanishing terms are bounded by their own precision, which acc carries;
        # nonzero terms are compared through the envelope (minimal v-order) of
        # the last two blocks of w indices
        last = [o for i, o in nonzero if i >= n - w]
        prev = [o for i, o in nonzero if n - 2 * w <= i < n - w]
        if not last:
            tail = acc.prec
        elif not prev or min(last) <= min(prev):
            raise TailNotDominated(
                f"term norms in the last {w} stored terms are not decreasing; "
                "series not certified to converge at this point"
            )
        else:
            # beyond the truncation the envelope keeps shrinking at least at
            # the observed per-block rate
            env = min(last)
            tail = env + max(1, (env - min(prev)) // w)
    res = acc.truncate(tail) if tail != INF else acc
    if floor is not None and res.prec < floor:
        raise TailNotDominated(f"certified floor {res.prec} below requested {floor}")
    return res


def omega_series(F: FieldParams, D: int, prec: int | None = None) -> TateSeries:
    """Omega = (-theta)^(-q/(q-1)) prod_{i>=1} (1 - t/theta^(q^i)) to t-degree D.

    In the uniformizer the prefactor is v^(qE/(q-1)) and 1 - t/theta^(q^i)
    equals 1 + v^(E q^i) t.  Factors are included while their v-order keeps
    them above ``prec``; the first excluded factor i0 bounds everything
    dropped from the t^k coefficient by v^(qE/(q-1) + E (q^i0 + q + ... + q^(k-1))),
    which is the certified precision recorded on that coefficient.
    """
    if D < 0:
        raise ValueError("D must be >= 0")
    prec = F.prec if prec is None else prec
    base = F.zdeg * F.q
    if base >= prec:
        raise PrecisionExhausted("precision below the order of Omega's prefactor")
    E, q = F.E, F.q
    i0 = 1
    while base + E * q**i0 < prec:
        i0 += 1
    k_prec = []
    for k in range(D + 1):
        if k == 0:
            k_prec.append(max(prec, base + E * q**i0))
        else:
            k_prec.append(max(prec, base + E * (q**i0 + sum(q**j for j in range(1, k)))))
    coeffs = [LaurentApprox.monomial(F, base).truncate(k_prec[0])]
    coeffs += [LaurentApprox.zero(F, k_prec[k]) for k in range(1, D + 1)]
    for i in range(1, i0):
        m = LaurentApprox.monomial(F, E * q**i)
        new = list(coeffs)
        for k in range(1, D + 1):
            if not coeffs[k - 1].is_zero():
                new[k] = (coeffs[k] + m * coeffs[k - 1]).truncate(k_prec[k])
        coeffs = new
    return TateSeries(F, coeffs, D)


def carlitz_period(F: FieldParams, prec: int | None = None) -> LaurentApprox:
    """pi~ = theta (-theta)^(1/(q-1)) prod_{i>=1} (1 - theta^(1-q^i))^(-1).

    theta * zeta = -v^(-q E/(q-1)) and theta^(1-q^i) = v^(E (q^i - 1)).
    """
    prec = F.prec if prec is None else prec
    lead_ord = -F.zdeg * F.q
    rel = prec - lead_ord
    if rel <= 0:
        raise PrecisionExhausted("precision below the order of the Carlitz period")
    one = LaurentApprox.one(F)
    prod = one
    i = 1
    while F.E * (F.q**i - 1) < rel:
        fac = one - LaurentApprox.monomial(F, F.E * (F.q**i - 1))
        prod = prod * fac.inverse(rel)
        i += 1
    lead = LaurentApprox.monomial(F, lead_ord, F.gf.neg(1))
    return (lead * prod.truncate(rel)).truncate(prec)


def geometric_inverse(F: FieldParams, a, D: int, power: int = 1) -> TateSeries:
    """Series of (a - t)^(-power) to t-degree D for a constant a with |a| > 1:
    a^(-power) sum_k C(power+k-1, k) (t/a)^k."""
    ainv = 1 / a if not isinstance(a, LaurentApprox) else a.inverse()
    p = F.p
    out = []
    apow = ainv**power
    cur = apow
    for k in range(D + 1):
        b = comb(power + k - 1, k) % p
        out.append(cur * b if b else AlgFrac.zero(F))
        cur = cur * ainv
    return TateSeries(F, out, D)
