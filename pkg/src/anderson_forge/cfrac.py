"""Fractions whose denominator is a product of ``c_j = theta^(q^j) - theta``.

Exp and Log coefficients of Drinfeld modules and t-modules only ever divide
by the ``c_j``.  Keeping the denominator as an exponent vector avoids all
polynomial gcds: since ``c_j`` has F_p-coefficients, ``c_j^(q^k)`` is the
two-term polynomial ``theta^(q^(j+k)) - theta^(q^k)``, so multiplying by any
power of ``c_j`` costs a handful of shifted subtractions, and twisting just
multiplies the exponents by ``q``.  Values are not kept in lowest terms;
:meth:`CFrac.to_algfrac` produces the reduced fraction when needed.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from . import poly as P
from .algebra import AlgCoeff, AlgFrac
from .ff import FieldParams
from .laurent import INF, LaurentApprox, alg_embed

Exps = tuple[tuple[int, int], ...]


def _norm_exps(exps: Iterable[tuple[int, int]]) -> Exps:
    acc: dict[int, int] = {}
    for j, e in exps:
        if j < 1:
            raise ValueError("c_j is only defined for j >= 1")
        if e:
            acc[j] = acc.get(j, 0) + e
    if any(e < 0 for e in acc.values()):
        raise ValueError("negative c-exponent")
    return tuple(sorted((j, e) for j, e in acc.items() if e))


def _digits(e: int, q: int) -> list[int]:
    out = []
    while e:
        e, d = divmod(e, q)
        out.append(d)
    return out


def mul_c_power(F: FieldParams, a: np.ndarray, j: int, e: int) -> np.ndarray:
    """Multiply the w-polynomial ``a`` by ``c_j^e`` using base-q digits of e."""
    if e == 0 or a.shape[1] == 0:
        return a
    G, q, wd, p = F.gf, F.q, F.wdeg, F.p
    if p == 2 and G.k == 1:
        # characteristic-2 prime field: shift-XOR on a big-integer bitset
        n = a.shape[1]
        x = int.from_bytes(np.packbits(a[0].astype(np.uint8), bitorder="little").tobytes(), "little")
        for k, d in enumerate(_digits(e, q)):
            hi, lo = wd * q ** (j + k), wd * q**k
            for _ in range(d):
                x = (x << hi) ^ (x << lo)
                n += hi
        raw = np.frombuffer(x.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little", count=n).astype(np.int64)[None, :]
    for k, d in enumerate(_digits(e, q)):
        hi, lo = wd * q ** (j + k), wd * q**k
        for _ in range(d):
            n = a.shape[1]
            out = np.zeros((G.k, n + hi), dtype=np.int64)
            out[:, hi:] = a
            out[:, lo : lo + n] -= a
            out %= p
            a = out
    return a


STEP_LIMIT = 2
_MULT_CACHE: dict[tuple, np.ndarray] = {}


def c_multiplier(F: FieldParams, delta: Exps) -> np.ndarray:
    """Planes of ``prod_j c_j^(e_j)`` (cached)."""
    key = (F.key, delta)
    out = _MULT_CACHE.get(key)
    if out is None:
        out = P.const(F.gf, 1)
        for j, e in delta:
            out = mul_c_power(F, out, j, e)
        if len(_MULT_CACHE) > 4096:
            _MULT_CACHE.clear()
        _MULT_CACHE[key] = out
    return out


def raise_planes(F: FieldParams, a: np.ndarray, delta: Exps) -> np.ndarray:
    """Multiply ``a`` by ``prod_j c_j^(e_j)``: shifted subtractions for a few
    two-term factors, otherwise one product with the cached multiplier."""
    if not delta or a.shape[1] == 0:
        return a
    steps = sum(sum(_digits(e, F.q)) for _, e in delta)
    if steps <= STEP_LIMIT:
        for j, e in delta:
            a = mul_c_power(F, a, j, e)
        return a
    return P.mul(F.gf, a, c_multiplier(F, delta))


class CFrac:
    """``num / prod_j c_j^(e_j)`` with ``num`` an :class:`AlgCoeff`."""

    __slots__ = ("num", "exps")

    def __init__(self, num: AlgCoeff, exps: Iterable[tuple[int, int]] = ()):
        self.num = num
        self.exps: Exps = () if num.is_zero() else _norm_exps(exps)

    @property
    def F(self) -> FieldParams:
        return self.num.F

    # ---------------------------------------------------------- builders
    @classmethod
    def of(cls, x, F: FieldParams | None = None) -> "CFrac":
        if isinstance(x, CFrac):
            return x
        if isinstance(x, AlgCoeff):
            return cls(x)
        if isinstance(x, int):
            if F is None:
                raise TypeError("field needed to coerce an int")
            return cls(AlgCoeff.from_int(F, x))
        raise TypeError(f"cannot coerce {type(x).__name__} to CFrac")

    @classmethod
    def zero(cls, F: FieldParams) -> "CFrac":
        return cls(AlgCoeff.zero(F))

    @classmethod
    def one(cls, F: FieldParams) -> "CFrac":
        return cls(AlgCoeff.one(F))

    @staticmethod
    def c_poly(F: FieldParams, j: int) -> AlgCoeff:
        return AlgCoeff.theta(F, F.q**j) - AlgCoeff.theta(F, 1)

    # ----------------------------------------------------------- queries
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return not self.exps

    def den_degree(self) -> int:
        """w-degree of the (unreduced) denominator."""
        return sum(e * self.F.wdeg * self.F.q**j for j, e in self.exps)

    def size(self) -> int:
        return self.num.degree + 1 if not self.is_zero() else 0

    # -------------------------------------------------------- arithmetic
    def _raise_to(self, target: dict[int, int]) -> AlgCoeff:
        mine = dict(self.exps)
        delta = tuple(sorted((j, e - mine.get(j, 0)) for j, e in target.items() if e != mine.get(j, 0)))
        if any(e < 0 for _, e in delta):
            raise ValueError("target denominator does not cover this fraction")
        return AlgCoeff(self.F, P.trim(raise_planes(self.F, self.num.c, delta)))

    def _coerce(self, other) -> "CFrac":
        return CFrac.of(other, self.F)

    def __add__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.exps == other.exps:
            return CFrac(self.num + other.num, self.exps)
        target = dict(self.exps)
        for j, e in other.exps:
            target[j] = max(target.get(j, 0), e)
        return CFrac(self._raise_to(target) + other._raise_to(target), target.items())

    __radd__ = __add__

    def __neg__(self):
        return CFrac(-self.num, self.exps)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return CFrac.zero(self.F)
        return CFrac(self.num * other.num, self.exps + other.exps)

    __rmul__ = __mul__

    def scale(self, code: int) -> "CFrac":
        return CFrac(self.num.scale(code), self.exps)

    def div_c(self, j: int, e: int = 1) -> "CFrac":
        """Divide by ``c_j^e``."""
        return CFrac(self.num, self.exps + ((j, e),))

    def twist(self, j: int = 1) -> "CFrac":
        if j < 0:
            return self._neg_twist(j)
        qj = self.F.q**j
        return CFrac(self.num.twist(j), ((i, e * qj) for i, e in self.exps))

    def _neg_twist(self, j: int) -> "CFrac":
        # only polynomials survive negative twists (raises InverseTwistUndefined otherwise)
        if self.exps:
            from .errors import InverseTwistUndefined

            raise InverseTwistUndefined("negative twist of a fraction with c-denominator")
        return CFrac(self.num.twist(j))

    def __eq__(self, other) -> bool:
        if isinstance(other, AlgFrac):
            return self.to_algfrac() == other
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.exps == other.exps:
            return self.num == other.num
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    # ------------------------------------------------------- conversions
    def denominator(self) -> AlgCoeff:
        return CFrac(AlgCoeff.one(self.F))._raise_to(dict(self.exps))

    def to_algfrac(self) -> AlgFrac:
        if not self.exps:
            return AlgFrac(self.num)
        return AlgFrac(self.num, self.denominator())

    def lift(self, Fs: FieldParams) -> "CFrac":
        """Map from the ``s = 0`` ring into ``Fs`` (same p, q, m) by ``theta -> w^(q^s)``."""
        F = self.F
        if F.s != 0 or (F.p, F.q, F.m) != (Fs.p, Fs.q, Fs.m):
            raise ValueError("lift goes from an s = 0 ring into a ring with the same p, q, m")
        if Fs.s == 0:
            return self
        return CFrac(AlgCoeff(Fs, P.stretch(F.gf, self.num.c, Fs.wdeg)), self.exps)

    def valuation(self) -> int:
        """v-adic order of the value."""
        F = self.F
        if self.is_zero():
            return INF
        return -self.num.degree * F.wstep + sum(e * F.E * F.q**j for j, e in self.exps)

    def embed(self, prec: int | None = None) -> LaurentApprox:
        """Laurent expansion to absolute precision ``prec`` (default field precision).

        ``c_j = -v^(-E q^j) (1 - v^(E (q^j - 1)))``, so the inverse denominator
        is a signed monomial times a product of geometric series."""
        F = self.F
        if prec is None:
            prec = F.prec
        num = alg_embed(self.num)
        if not self.exps:
            return num.truncate(prec)
        low = self.valuation()
        rel = prec - low
        if rel <= 0:
            return LaurentApprox.zero(F, prec)
        G = F.gf
        ser = np.zeros(rel, dtype=np.int64)
        ser[0] = 1
        sign_exp = 0
        mono = 0
        for j, e in self.exps:
            sign_exp += e
            mono += e * F.E * F.q**j
            step = F.E * (F.q**j - 1)
            for k, d in enumerate(_digits(e, F.q)):
                st = step * F.q**k
                for _ in range(d):
                    # multiply by 1/(1 - v^st): running prefix sums with stride st
                    for b in range(st, rel, st):
                        ser[b : b + st] = (ser[b : b + st] + ser[b - st : b][: rel - b]) % F.p
        # ser has F_p entries: lift into the digit planes of the constant field
        planes = P.zeros(G, rel)
        planes[0, :] = ser
        code = G.neg(1) if sign_exp % 2 else 1
        den_inv = LaurentApprox(F, mono, planes, INF).truncate(mono + rel)
        if code != 1:
            den_inv = den_inv.scale(code)
        return (num * den_inv).truncate(prec)

    # -------------------------------------------------------------- misc
    def __repr__(self) -> str:
        if not self.exps:
            return f"CFrac({self.num.to_str()})"
        den = " * ".join(f"c{j}^{e}" if e > 1 else f"c{j}" for j, e in self.exps)
        return f"CFrac(({self.num.to_str()}) / ({den}))"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "cexp": [[j, e] for j, e in self.exps]}

    @classmethod
    def from_json(cls, obj: dict, F: FieldParams | None = None) -> "CFrac":
        return cls(AlgCoeff.from_json(obj["num"], F), [tuple(x) for x in obj["cexp"]])


def csum(terms: Iterable[CFrac], F: FieldParams) -> CFrac:
    """Sum of many fractions over one common denominator (each term raised once)."""
    terms = [t for t in terms if not t.is_zero()]
    if not terms:
        return CFrac.zero(F)
    if len(terms) == 1:
        return terms[0]
    groups: dict[Exps, list[np.ndarray]] = {}
    for t in terms:
        groups.setdefault(t.exps, []).append(t.num.c)
    if len(groups) < len(terms):
        terms = [CFrac(AlgCoeff(F, P.trim(_plane_sum(F, arrs))), ex) for ex, arrs in groups.items()]
        terms = [t for t in terms if not t.is_zero()]
        if len(terms) <= 1:
            return terms[0] if terms else CFrac.zero(F)
    target: dict[int, int] = {}
    for t in terms:
        for j, e in t.exps:
            if target.get(j, 0) < e:
                target[j] = e
    raised = [t._raise_to(target).c for t in terms]
    return CFrac(AlgCoeff(F, P.trim(_plane_sum(F, raised))), target.items())


def _plane_sum(F: FieldParams, arrs: list[np.ndarray]) -> np.ndarray:
    n = max(a.shape[1] for a in arrs)
    acc = np.zeros((F.gf.k, n), dtype=np.int64)
    for a in arrs:
        acc[:, : a.shape[1]] += a
    acc %= F.p
    return acc


def common_form(X: list[list[CFrac]]) -> tuple[list[list[np.ndarray]], dict[int, int]]:
    """Numerator planes of every entry over the entrywise-max denominator of X."""
    target: dict[int, int] = {}
    for row in X:
        for x in row:
            for j, e in x.exps:
                if target.get(j, 0) < e:
                    target[j] = e
    return [[x._raise_to(target).c if not x.is_zero() else x.num.c for x in row] for row in X], target


def descend(x: AlgCoeff) -> AlgCoeff | None:
    """Map an element of F_{q^m}[theta] inside the ``s``-ring to the ``s = 0`` ring."""
    F = x.F
    if F.s == 0:
        return x
    c = P.compress(F.gf, x.c, F.wdeg)
    if c is None:
        return None
    return AlgCoeff(F.with_(s=0), c)
