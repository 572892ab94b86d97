"""Exact coefficients: the twist-closed ring F_{q^m}[w] (w^(q^s) = theta) and its fractions.

``AlgCoeff`` is a polynomial in ``w``; ``AlgFrac`` a normalized fraction of
two of them (denominator monic in ``w``).  Twisting ``x -> x^(q^j)`` raises
coefficients to the ``q^j`` power and multiplies ``w``-exponents by ``q^j``;
inverse twists exist exactly when every exponent is divisible by ``q^|j|``.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from . import poly as P
from .errors import FieldError, InverseTwistUndefined, ParseError
from .ff import FieldParams


def _check(a: "AlgCoeff | AlgFrac", b: "AlgCoeff | AlgFrac") -> None:
    if a.F.key != b.F.key:
        raise FieldError(f"incompatible fields {a.F.key} and {b.F.key}")


class AlgCoeff:
    """Element of F_{q^m}[w]."""

    __slots__ = ("F", "c", "_hash")

    def __init__(self, F: FieldParams, c: np.ndarray):
        self.F = F
        c = P.trim(c)
        c.setflags(write=False)
        self.c = c
        self._hash = None

    # ------------------------------------------------------------ builders
    @classmethod
    def zero(cls, F: FieldParams) -> "AlgCoeff":
        return cls(F, P.zeros(F.gf))

    @classmethod
    def one(cls, F: FieldParams) -> "AlgCoeff":
        return cls(F, P.const(F.gf, 1))

    @classmethod
    def const(cls, F: FieldParams, code: int) -> "AlgCoeff":
        return cls(F, P.const(F.gf, code))

    @classmethod
    def from_int(cls, F: FieldParams, n: int) -> "AlgCoeff":
        return cls(F, P.const(F.gf, n % F.p))

    @classmethod
    def w(cls, F: FieldParams, e: int = 1, code: int = 1) -> "AlgCoeff":
        return cls(F, P.monomial(F.gf, code, e))

    @classmethod
    def theta(cls, F: FieldParams, e: int = 1, code: int = 1) -> "AlgCoeff":
        return cls(F, P.monomial(F.gf, code, e * F.wdeg))

    @classmethod
    def from_terms(cls, F: FieldParams, terms) -> "AlgCoeff":
        """From an iterable of (w_exponent, code) pairs (codes summed)."""
        terms = [(int(e), int(c)) for e, c in terms]
        n = max((e for e, _ in terms), default=-1) + 1
        arr = P.zeros(F.gf, n)
        G = F.gf
        for e, c in terms:
            if e < 0:
                raise FieldError("negative w-exponent in AlgCoeff")
            arr[:, e] = G.digits(G.add(G.from_digits(arr[:, e]), c))
        return cls(F, arr)

    @classmethod
    def theta_poly(cls, F: FieldParams, coeffs) -> "AlgCoeff":
        """From F_p-integers (or codes) c_0, c_1, ... meaning sum c_i theta^i."""
        return cls.from_terms(F, [(i * F.wdeg, c % F.gf.order) for i, c in enumerate(coeffs)])

    # ------------------------------------------------------------ queries
    @property
    def degree(self) -> int:
        """w-degree (-1 for zero)."""
        return self.c.shape[1] - 1

    def is_zero(self) -> bool:
        return self.c.shape[1] == 0

    def is_const(self) -> bool:
        return self.c.shape[1] <= 1

    def is_one(self) -> bool:
        return self.c.shape[1] == 1 and self.F.gf.from_digits(self.c[:, 0]) == 1

    def coeff(self, e: int) -> int:
        return P.coeff(self.F.gf, self.c, e)

    def lead(self) -> int:
        return P.lead(self.F.gf, self.c)

    def terms(self) -> list[tuple[int, int]]:
        G = self.F.gf
        idx = np.flatnonzero(self.c.any(axis=0))
        return [(int(i), G.from_digits(self.c[:, i])) for i in idx]

    def low_order(self) -> int:
        return P.low_order(self.c)

    # ---------------------------------------------------------- arithmetic
    def _coerce(self, other) -> "AlgCoeff":
        if isinstance(other, AlgCoeff):
            _check(self, other)
            return other
        if isinstance(other, int):
            return AlgCoeff.from_int(self.F, other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, AlgFrac):
            return AlgFrac.of(self) + other
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgCoeff(self.F, P.add(self.F.gf, self.c, o.c))

    __radd__ = __add__

    def __neg__(self):
        return AlgCoeff(self.F, P.neg(self.F.gf, self.c))

    def __sub__(self, other):
        if isinstance(other, AlgFrac):
            return AlgFrac.of(self) - other
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgCoeff(self.F, P.sub(self.F.gf, self.c, o.c))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, AlgFrac):
            return AlgFrac.of(self) * other
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgCoeff(self.F, P.mul(self.F.gf, self.c, o.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return AlgFrac.of(self) / other

    def __rtruediv__(self, other):
        return AlgFrac.of(self._coerce(other)) / self

    def __pow__(self, n: int):
        if n < 0:
            return AlgFrac.of(self) ** n
        result = AlgCoeff.one(self.F)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, code: int) -> "AlgCoeff":
        return AlgCoeff(self.F, P.scale(self.F.gf, self.c, code))

    def divmod(self, other: "AlgCoeff") -> tuple["AlgCoeff", "AlgCoeff"]:
        q, r = P.divmod_(self.F.gf, self.c, other.c)
        return AlgCoeff(self.F, q), AlgCoeff(self.F, r)

    def exact_div(self, other: "AlgCoeff") -> "AlgCoeff":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = AlgCoeff.from_int(self.F, other)
        if isinstance(other, AlgFrac):
            return other.den.is_one() and other.num == self
        if not isinstance(other, AlgCoeff):
            return NotImplemented
        return self.F.key == other.F.key and P.equal(self.c, other.c)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.F.key, self.c.shape, self.c.tobytes()))
        return self._hash

    # --------------------------------------------------------------- twist
    def twist(self, j: int = 1) -> "AlgCoeff":
        """x^(q^j); for j < 0 requires all exponents divisible by q^|j|."""
        if j == 0 or self.is_zero():
            return self
        F = self.F
        G = F.gf
        M = F.twist_matrix(j)
        if j > 0:
            arr = P.stretch(G, self.c, F.q**j)
        else:
            arr = P.compress(G, self.c, F.q ** (-j))
            if arr is None:
                raise InverseTwistUndefined(
                    f"element has w-exponents not divisible by q^{-j} (s={F.s} too small?)"
                )
        return AlgCoeff(F, P.linmap(G, arr, M) if G.k > 1 else arr)

    def twist_depth(self) -> int:
        """Largest j with x^(q^-j) defined (large sentinel for constants)."""
        g = P.exponent_gcd(self.c)
        if g == 0:
            return 1 << 30
        d = 0
        while g % self.F.q == 0:
            g //= self.F.q
            d += 1
        return d

    # ------------------------------------------------------------- display
    def __repr__(self) -> str:
        return f"AlgCoeff({self.to_str()})"

    def to_str(self) -> str:
        if self.is_zero():
            return "0"
        F = self.F
        G = F.gf
        parts = []
        for e, c in reversed(self.terms()):
            cs = _code_str(G, c)
            if F.s > 0 and e % F.wdeg:
                mon = "w" if e == 1 else f"w^{e}"
            else:
                te = e // F.wdeg
                mon = "theta" if te == 1 else f"theta^{te}"
            if e == 0:
                parts.append(cs)
            elif cs == "1":
                parts.append(mon)
            else:
                parts.append(f"{cs}*{mon}")
        return " + ".join(parts)

    # ---------------------------------------------------------------- json
    def to_json(self) -> dict:
        return {
            "field": self.F.to_json(),
            "coeffs": [[e, self.F.gf.digits(c)] for e, c in self.terms()],
        }

    @classmethod
    def from_json(cls, obj: dict, F: FieldParams | None = None) -> "AlgCoeff":
        try:
            fld = obj["field"]
            if F is None:
                F = FieldParams(p=fld["p"], q=fld["q"], m=fld["m"], s=fld["s"])
            elif (fld["p"], fld["q"], fld["m"], fld["s"]) != F.key:
                raise ParseError("field of JSON coefficient does not match context")
            G = F.gf
            terms = []
            last = -1
            for e, ds in obj["coeffs"]:
                if e <= last:
                    raise ParseError("AlgCoeff exponents must be strictly ascending")
                last = e
                if len(ds) != G.k or any(not (0 <= d < G.p) for d in ds):
                    raise ParseError("bad F_p digit vector")
                c = G.from_digits(ds)
                if c == 0:
                    raise ParseError("zero coefficient stored in AlgCoeff JSON")
                terms.append((e, c))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed AlgCoeff JSON: {exc}") from exc
        return cls.from_terms(F, terms)


def _code_str(G, c: int) -> str:
    if G.k == 1:
        return str(c)
    if c in (0, 1):
        return str(c)
    ds = G.digits(c)
    parts = []
    for i, d in enumerate(ds):
        if d:
            if i == 0:
                parts.append(str(d))
            else:
                mon = "x" if i == 1 else f"x^{i}"
                parts.append(mon if d == 1 else f"{d}*{mon}")
    return "(" + " + ".join(reversed(parts)) + ")"


Scalar = Union[int, AlgCoeff, "AlgFrac"]


class AlgFrac:
    """Normalized fraction num/den of AlgCoeff elements, den monic in w."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: AlgCoeff, den: AlgCoeff | None = None, _normalized: bool = False):
        F = num.F
        if den is None:
            den = AlgCoeff.one(F)
        if den.is_zero():
            raise ZeroDivisionError("AlgFrac with zero denominator")
        if not _normalized:
            if num.is_zero():
                den = AlgCoeff.one(F)
            elif not den.is_const():
                G = F.gf
                g = P.gcd(G, num.c, den.c)
                if g.shape[1] > 1:
                    num = AlgCoeff(F, P.divmod_(G, num.c, g)[0])
                    den = AlgCoeff(F, P.divmod_(G, den.c, g)[0])
            lc = den.lead()
            if lc != 1:
                inv = F.gf.inv(lc)
                num = num.scale(inv)
                den = den.scale(inv)
        self.num = num
        self.den = den
        self._hash = None

    @property
    def F(self) -> FieldParams:
        return self.num.F

    @classmethod
    def of(cls, x, F: FieldParams | None = None) -> "AlgFrac":
        if isinstance(x, AlgFrac):
            return x
        if isinstance(x, AlgCoeff):
            return cls(x, None, _normalized=True)
        if isinstance(x, int):
            if F is None:
                raise FieldError("field required to coerce an int")
            return cls(AlgCoeff.from_int(F, x), None, _normalized=True)
        raise TypeError(f"cannot coerce {type(x).__name__} to AlgFrac")

    @classmethod
    def zero(cls, F: FieldParams) -> "AlgFrac":
        return cls(AlgCoeff.zero(F), None, _normalized=True)

    @classmethod
    def one(cls, F: FieldParams) -> "AlgFrac":
        return cls(AlgCoeff.one(F), None, _normalized=True)

    @classmethod
    def theta(cls, F: FieldParams, e: int = 1) -> "AlgFrac":
        return cls(AlgCoeff.theta(F, e), None, _normalized=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_one() and self.num.is_one()

    def is_poly(self) -> bool:
        return self.den.is_one()

    def _coerce(self, other) -> "AlgFrac":
        if isinstance(other, AlgFrac):
            _check(self, other)
            return other
        if isinstance(other, AlgCoeff):
            _check(self, other)
            return AlgFrac(other, None, _normalized=True)
        if isinstance(other, int):
            return AlgFrac(AlgCoeff.from_int(self.F, other), None, _normalized=True)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            if self.den.is_one():
                return AlgFrac(self.num + o.num, self.den, _normalized=True)
            return AlgFrac(self.num + o.num, self.den)
        return AlgFrac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return AlgFrac(-self.num, self.den, _normalized=True)

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
        if self.is_zero() or o.is_zero():
            return AlgFrac.zero(self.F)
        if self.den.is_one() and o.den.is_one():
            return AlgFrac(self.num * o.num, self.den, _normalized=True)
        if o.num.is_const() and o.den.is_one():
            return AlgFrac(self.num * o.num, self.den, _normalized=True)
        if self.num.is_const() and self.den.is_one():
            return AlgFrac(self.num * o.num, o.den, _normalized=True)
        return AlgFrac(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "AlgFrac":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero AlgFrac")
        return AlgFrac(self.den, self.num, _normalized=False)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = AlgFrac.one(self.F)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, AlgCoeff)):
            other = AlgFrac.of(other, self.F)
        if not isinstance(other, AlgFrac):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def twist(self, j: int = 1) -> "AlgFrac":
        if j == 0:
            return self
        return AlgFrac(self.num.twist(j), self.den.twist(j), _normalized=True)

    def __repr__(self) -> str:
        if self.den.is_one():
            return f"AlgFrac({self.num.to_str()})"
        return f"AlgFrac(({self.num.to_str()})/({self.den.to_str()}))"

    def to_json(self) -> dict:
        out = self.num.to_json()
        if not self.den.is_one():
            out["den"] = [[e, self.F.gf.digits(c)] for e, c in self.den.terms()]
        return out

    @classmethod
    def from_json(cls, obj: dict, F: FieldParams | None = None) -> "AlgFrac":
        num = AlgCoeff.from_json(obj, F)
        if "den" in obj:
            den = AlgCoeff.from_json({"field": obj["field"], "coeffs": obj["den"]}, num.F)
            return cls(num, den)
        return cls(num, None, _normalized=True)


def K(F: FieldParams, x) -> AlgFrac:
    """Coerce ``x`` (int, AlgCoeff, AlgFrac) into the fraction field."""
    return AlgFrac.of(x, F)
