"""Truncated Laurent series in the uniformizer v over F_{q^m}.

The model of C_inf used throughout: ``-theta = v^(-E)`` with
``E = (q^m-1) q^s``, so that ``w = theta^(1/q^s)`` maps to
``eps * v^(-(q^m-1))`` and ``(-theta)^(1/(q-1))`` maps to ``v^(-E/(q-1))``.  Precision is *absolute*: a
value ``x`` with ``prec = N`` is known modulo ``v^N``.  Exact values (finite
Laurent polynomials) carry ``prec = inf``.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import poly as P
from .algebra import AlgCoeff, AlgFrac
from .errors import (
    DivisionByApparentZero,
    FieldError,
    NegativeTwistOnSeries,
    ParseError,
    PrecisionExhausted,
)
from .ff import FieldParams

INF = math.inf


class LaurentApprox:
    """Immutable value ``sum_i coeffs[i] v^(lowest+i) + O(v^prec)``."""

    __slots__ = ("F", "lowest", "c", "prec")

    def __init__(self, F: FieldParams, lowest: int, c: np.ndarray, prec=INF):
        if prec != INF:
            prec = int(prec)
            keep = max(0, min(c.shape[1], prec - lowest))
            c = c[:, :keep]
        nz = np.flatnonzero(c.any(axis=0)) if c.shape[1] else np.zeros(0, dtype=np.int64)
        if nz.size == 0:
            c = c[:, :0]
            lowest = prec if prec != INF else 0
        else:
            first, last = int(nz[0]), int(nz[-1])
            c = c[:, first : last + 1]
            lowest = lowest + first
        c.setflags(write=False)
        self.F = F
        self.lowest = int(lowest) if lowest != INF else lowest
        self.c = c
        self.prec = prec

    # ------------------------------------------------------------ builders
    @classmethod
    def zero(cls, F: FieldParams, prec=INF) -> "LaurentApprox":
        return cls(F, 0, P.zeros(F.gf), prec)

    @classmethod
    def one(cls, F: FieldParams) -> "LaurentApprox":
        return cls.monomial(F, 0, 1)

    @classmethod
    def monomial(cls, F: FieldParams, e: int, code: int = 1) -> "LaurentApprox":
        return cls(F, e, P.const(F.gf, code))

    @classmethod
    def const(cls, F: FieldParams, code: int) -> "LaurentApprox":
        return cls.monomial(F, 0, code)

    @classmethod
    def from_codes(cls, F: FieldParams, lowest: int, codes, prec=INF) -> "LaurentApprox":
        return cls(F, lowest, F.gf.to_planes(codes), prec)

    @classmethod
    def theta(cls, F: FieldParams) -> "LaurentApprox":
        """theta = -v^(-E)."""
        return cls.monomial(F, -F.E, F.gf.neg(1))

    @classmethod
    def zeta(cls, F: FieldParams) -> "LaurentApprox":
        """(-theta)^(1/(q-1)) = v^(-E/(q-1))."""
        return cls.monomial(F, -F.zdeg, 1)

    # ------------------------------------------------------------ queries
    @property
    def n(self) -> int:
        return self.c.shape[1]

    def is_exact(self) -> bool:
        return self.prec == INF

    def is_zero(self) -> bool:
        """Indistinguishable from zero at the stored precision."""
        return self.c.shape[1] == 0

    def valuation(self):
        """ord_v (``prec`` if indistinguishable from zero)."""
        return self.lowest if self.n else self.prec

    ord = valuation

    def rel_prec(self):
        return self.prec - self.valuation() if self.n else 0

    def norm_exponent(self) -> Fraction | float:
        """log_q |x| = -ord_v(x)/E."""
        if not self.n:
            return -INF
        return Fraction(-self.lowest, self.F.E)

    def coeff(self, e: int) -> int:
        """Coefficient code of v^e (raises if beyond precision)."""
        if e >= self.prec:
            raise PrecisionExhausted(f"coefficient of v^{e} beyond precision {self.prec}")
        return P.coeff(self.F.gf, self.c, e - self.lowest)

    def leading(self) -> int:
        return P.coeff(self.F.gf, self.c, 0) if self.n else 0

    def codes(self) -> list[int]:
        return self.F.gf.to_codes(self.c).tolist() if self.n else []

    def terms(self) -> list[tuple[int, int]]:
        G = self.F.gf
        idx = np.flatnonzero(self.c.any(axis=0))
        return [(self.lowest + int(i), G.from_digits(self.c[:, i])) for i in idx]

    # ---------------------------------------------------------- arithmetic
    def _coerce(self, other) -> "LaurentApprox":
        if isinstance(other, LaurentApprox):
            if other.F.key != self.F.key:
                raise FieldError("incompatible fields")
            return other
        if isinstance(other, int):
            return LaurentApprox.const(self.F, other % self.F.p)
        if isinstance(other, AlgCoeff):
            return alg_embed(other)
        if isinstance(other, AlgFrac):
            return embed_frac(other, self.prec if self.prec != INF else self.F.prec)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = min(self.prec, o.prec)
        if not o.n:
            return self.truncate(prec) if prec < self.prec else self
        if not self.n:
            return o.truncate(prec) if prec < o.prec else o
        lo = min(self.lowest, o.lowest)
        hi = max(self.lowest + self.n, o.lowest + o.n)
        if prec != INF:
            hi = min(hi, prec)
        if hi <= lo:
            return LaurentApprox.zero(self.F, prec)
        F = self.F
        out = P.zeros(F.gf, hi - lo)
        for x in (self, o):
            a = x.lowest - lo
            b = min(x.n, hi - x.lowest)
            if b > 0:
                out[:, a : a + b] += x.c[:, :b]
        out %= F.p
        return LaurentApprox(F, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentApprox(self.F, self.lowest, (-self.c) % self.F.p, self.prec)

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
        oa, ob = self.valuation(), o.valuation()
        prec = min(oa + o.prec, ob + self.prec)
        F = self.F
        if not self.n or not o.n:
            return LaurentApprox.zero(F, prec)
        lo = self.lowest + o.lowest
        nout = None if prec == INF else prec - lo
        if nout is not None and nout <= 0:
            return LaurentApprox.zero(F, prec)
        return LaurentApprox(F, lo, P.mul(F.gf, self.c, o.c, nout), prec)

    __rmul__ = __mul__

    def scale(self, code: int) -> "LaurentApprox":
        return LaurentApprox(self.F, self.lowest, P.scale(self.F.gf, self.c, code), self.prec)

    def shift(self, e: int) -> "LaurentApprox":
        """Multiply by v^e."""
        return LaurentApprox(self.F, self.lowest + e, self.c, self.prec + e)

    def inverse(self, prec=None) -> "LaurentApprox":
        """1/x; ``prec`` caps the absolute precision (default: field precision
        when the exact answer is an infinite series)."""
        F = self.F
        if not self.n:
            raise DivisionByApparentZero("division by a value indistinguishable from 0")
        o = self.lowest
        if self.prec == INF and self.n == 1:
            lead = F.gf.inv(self.leading())
            return LaurentApprox.monomial(F, -o, lead)
        rel = self.prec - o
        if prec is None and rel == INF:
            prec = F.prec
        target = -o + rel
        if prec is not None:
            target = min(target, prec)
        nrel = target - (-o)
        if nrel <= 0:
            return LaurentApprox.zero(F, target)
        u = self.c[:, : int(nrel)]
        inv = series_inverse(F, u, int(nrel))
        return LaurentApprox(F, -o, inv, target)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.div(o)

    def div(self, other, prec=None) -> "LaurentApprox":
        """self/other; ``prec`` caps the absolute precision of the result
        (default: the field precision when both operands are exact)."""
        o = self._coerce(other)
        if not o.n:
            raise DivisionByApparentZero("division by a value indistinguishable from 0")
        if o.prec == INF and o.n == 1:
            out = self * o.inverse()
            return out if prec is None else out.truncate(prec)
        ob = o.lowest
        if not self.n:
            p0 = self.prec - ob
            return LaurentApprox.zero(self.F, p0 if prec is None else min(p0, prec))
        oa = self.lowest
        rel = min(self.prec - oa, o.prec - ob)
        if prec is None and rel == INF:
            prec = self.F.prec
        if prec is not None:
            rel = min(rel, prec - (oa - ob))
        if rel <= 0:
            return LaurentApprox.zero(self.F, (oa - ob) + max(rel, 0) if rel != INF else INF)
        inv = o.inverse(-ob + rel)
        return (self * inv).truncate((oa - ob) + rel)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = LaurentApprox.one(self.F)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def twist(self, j: int = 1) -> "LaurentApprox":
        """Frobenius x -> x^(q^j), j >= 0."""
        if j < 0:
            raise NegativeTwistOnSeries(
                "inverse twists of truncated series are unsupported; rewrite in forward form"
            )
        if j == 0:
            return self
        F = self.F
        g = F.q**j
        arr = P.stretch(F.gf, self.c, g)
        if F.gf.k > 1:
            arr = (F.twist_matrix(j) @ arr) % F.p
        prec = self.prec * g if self.prec != INF else INF
        lowest = self.lowest * g if self.n else (prec if prec != INF else 0)
        return LaurentApprox(F, lowest, arr, prec)

    def truncate(self, prec) -> "LaurentApprox":
        if prec >= self.prec:
            return self
        return LaurentApprox(self.F, self.lowest, self.c, prec)

    # ----------------------------------------------------------- comparison
    def agrees(self, other, floor=None) -> bool:
        """True if self - other vanishes below ``floor`` (default: joint precision)."""
        d = self - other
        f = d.prec if floor is None else floor
        return d.valuation() >= f

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentApprox):
            return NotImplemented
        return (
            self.F.key == other.F.key
            and self.lowest == other.lowest
            and self.prec == other.prec
            and P.equal(self.c, other.c)
        )

    def __hash__(self) -> int:
        return hash((self.F.key, self.lowest, self.prec, self.c.tobytes()))

    def __repr__(self) -> str:
        ts = self.terms()[:6]
        G = self.F.gf
        body = " + ".join(f"{c}*v^{e}" for e, c in ts) if ts else "0"
        if self.n and len(self.terms()) > 6:
            body += " + ..."
        tail = "" if self.prec == INF else f" + O(v^{self.prec})"
        return f"LaurentApprox({body}{tail})"

    # ---------------------------------------------------------------- json
    def to_json(self) -> dict:
        G = self.F.gf
        return {
            "lowest": int(self.lowest) if self.n else (None if self.prec == INF else int(self.prec)),
            "prec": None if self.prec == INF else int(self.prec),
            "coeffs": [[int(d) for d in self.c[:, i]] for i in range(self.n)],
        }

    @classmethod
    def from_json(cls, obj: dict, F: FieldParams) -> "LaurentApprox":
        try:
            prec = INF if obj.get("prec") is None else int(obj["prec"])
            lowest = obj.get("lowest")
            coeffs = obj["coeffs"]
            G = F.gf
            arr = np.zeros((G.k, len(coeffs)), dtype=np.int64)
            for i, ds in enumerate(coeffs):
                if len(ds) != G.k or any(not (0 <= int(d) < G.p) for d in ds):
                    raise ParseError("bad digit vector in LaurentApprox JSON")
                arr[:, i] = ds
            if lowest is None:
                lowest = 0
            return cls(F, int(lowest), arr, prec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed LaurentApprox JSON: {exc}") from exc


def series_inverse(F: FieldParams, u: np.ndarray, n: int) -> np.ndarray:
    """Inverse of a power series with unit constant term, modulo X^n (Newton)."""
    G = F.gf
    c0 = G.from_digits(u[:, 0])
    x = P.const(G, G.inv(c0))
    prec = 1
    two = P.const(G, 2 % G.p)
    while prec < n:
        prec = min(2 * prec, n)
        ux = P.mul(G, u[:, :prec], x, prec)
        x = P.mul(G, x, P.sub(G, two, ux), prec)
    out = P.zeros(G, n)
    out[:, : x.shape[1]] = x[:, :n]
    return out


def alg_embed(x: AlgCoeff, prec=None) -> LaurentApprox:
    """Image of x under w -> eps * v^(-(q^m-1)); exact unless ``prec`` is given."""
    F = x.F
    G = F.gf
    if x.is_zero():
        return LaurentApprox.zero(F, INF if prec is None else prec)
    deg = x.degree
    step = F.wstep
    out = P.zeros(G, deg * step + 1)
    # coefficient of w^e lands at v^(-step*e); store with lowest = -step*deg
    eps = F.eps
    neg = G.neg(1)
    for e, c in x.terms():
        cc = G.mul(c, G.pow(eps, e)) if eps != 1 else c
        out[:, (deg - e) * step] = G.digits(cc)
    res = LaurentApprox(F, -deg * step, out)
    return res if prec is None else res.truncate(prec)


def embed_frac(x: AlgFrac, prec=None) -> LaurentApprox:
    """Image of a fraction, to absolute precision ``prec`` (default field precision)."""
    F = x.F
    num = alg_embed(x.num)
    if x.den.is_one():
        return num if prec is None else num.truncate(prec)
    den = alg_embed(x.den)
    if den.n == 1:
        out = num * den.inverse()
        return out if prec is None else out.truncate(prec)
    if prec is None:
        prec = F.prec
    return num.div(den, prec)


def embed(x, F: FieldParams, prec=None) -> LaurentApprox:
    """Embed int / AlgCoeff / AlgFrac / LaurentApprox."""
    if isinstance(x, LaurentApprox):
        return x if prec is None else x.truncate(prec)
    if isinstance(x, int):
        return LaurentApprox.const(F, x % F.p)
    if isinstance(x, AlgCoeff):
        return alg_embed(x, prec)
    if isinstance(x, AlgFrac):
        return embed_frac(x, prec)
    raise TypeError(type(x))
