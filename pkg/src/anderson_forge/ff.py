"""Finite fields F_{p^k} and the global field context.

Elements of F_{p^k} are encoded as Python ints ``c = sum(d_i * p**i)`` where
``d_i`` is the coefficient of ``x**i`` and ``x`` is a root of a fixed monic
modulus.  Arrays of elements (polynomial and series coefficients) use a
"planes" layout instead: an integer array of shape ``(k, n)`` whose row ``i``
holds the ``x**i`` digit of each coefficient.  In that layout addition is
digit-wise and every F_p-linear map (scaling by a constant, Frobenius) is a
small ``k x k`` matrix product.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import FieldError

# Monic moduli, coefficients listed from x^0 up to x^(k-1) (leading 1 implied).
# These are the Conway polynomials for the listed (p, k); every entry is
# primitive, which the test-suite re-verifies.
CONWAY: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1,),
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 1, 1, 0),
    (2, 7): (1, 1, 0, 0, 0, 0, 0),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0),
    (3, 1): (1,),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 0, 0, 2),
    (3, 5): (1, 2, 0, 0, 0),
    (3, 6): (2, 2, 1, 0, 2, 0),
    (5, 1): (3,),
    (5, 2): (2, 4),
    (5, 3): (3, 3, 0),
    (5, 4): (2, 4, 4, 0),
}

MAX_ORDER = 1 << 16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p**e, or raise."""
    if q < 2:
        raise FieldError(f"q={q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise FieldError(f"q={q} is not a prime power")
    return p, e


def _search_primitive(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first primitive monic modulus (fallback outside CONWAY)."""
    order = p**k - 1
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        if low[0] == 0:
            continue
        if _multiplicative_order_of_x(p, k, low) == order:
            return tuple(low)
    raise FieldError(f"no primitive polynomial found for p={p}, k={k}")


def _mulx(vec: list[int], low: list[int], p: int) -> list[int]:
    top = vec[-1]
    out = [0] + vec[:-1]
    if top:
        out = [(o - top * c) % p for o, c in zip(out, low)]
    return out


def _multiplicative_order_of_x(p: int, k: int, low: list[int]) -> int:
    one = [1] + [0] * (k - 1)
    v = _mulx(one, low, p)
    n = 1
    limit = p**k - 1
    while v != one:
        v = _mulx(v, low, p)
        n += 1
        if n > limit:
            return -1
    return n


class GF:
    """The finite field F_{p^k} with log/antilog tables."""

    def __init__(self, p: int, k: int):
        if not _is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if k < 1:
            raise FieldError("extension degree must be >= 1")
        self.p = p
        self.k = k
        self.order = p**k
        if self.order > MAX_ORDER:
            raise FieldError(f"F_{p}^{k} is larger than the supported table size")
        self.low = tuple(CONWAY.get((p, k)) or _search_primitive(p, k))
        self.powers = np.array([p**i for i in range(k)], dtype=np.int64)
        n = self.order - 1
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        v = [1] + [0] * (k - 1)
        for i in range(n):
            c = sum(d * p**j for j, d in enumerate(v))
            if log[c] != -1:
                raise FieldError(f"modulus for p={p}, k={k} is not primitive")
            exp[i] = c
            log[c] = i
            v = _mulx(v, list(self.low), p)
        exp[n:] = exp[:n]
        self.exp = exp
        self.log = log
        self._explist = exp.tolist()
        self._loglist = log.tolist()
        # reduction matrix: planes of degree < 2k-1 -> planes of degree < k
        red = np.zeros((k, 2 * k - 1), dtype=np.int64)
        for j in range(2 * k - 1):
            red[:, j] = self.digits(self.xpow(j))
        self.reduction = red

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})"

    # ---------------------------------------------------------------- codes
    def digits(self, c: int) -> list[int]:
        p = self.p
        return [(c // p**i) % p for i in range(self.k)]

    def from_digits(self, ds) -> int:
        p = self.p
        return sum((int(d) % p) * p**i for i, d in enumerate(ds))

    def xpow(self, j: int) -> int:
        if self.k == 1:
            return self._explist[j % (self.order - 1)] if self.order > 2 else 1
        return self._explist[j % (self.order - 1)]

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self.from_digits([-x for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return (a * b) % self.p
        return self._explist[self._loglist[a] + self._loglist[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._explist[(self.order - 1 - self._loglist[a]) % (self.order - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 0
        if self.k == 1:
            return pow(a, e % (self.p - 1), self.p) if self.p > 2 else 1
        return self._explist[(self._loglist[a] * e) % (self.order - 1)]

    def scalar_matrix(self, c: int) -> np.ndarray:
        """k x k matrix of multiplication by ``c`` acting on digit columns."""
        return _scalar_matrix(self, c)

    def power_matrix(self, e: int) -> np.ndarray:
        """k x k matrix of the F_p-linear map x -> x^(p^e)."""
        return _power_matrix(self, e % self.k)

    # --------------------------------------------------------------- planes
    def to_planes(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        if self.k == 1:
            return codes.reshape(1, -1).copy()
        return (codes[None, :] // self.powers[:, None]) % self.p

    def to_codes(self, planes: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return planes[0].copy()
        return self.powers @ planes


@functools.lru_cache(maxsize=4096)
def _scalar_matrix(F: GF, c: int) -> np.ndarray:
    k = F.k
    m = np.zeros((k, k), dtype=np.int64)
    for j in range(k):
        m[:, j] = F.digits(F.mul(c, F.xpow(j)) if k > 1 else c)
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=256)
def _power_matrix(F: GF, e: int) -> np.ndarray:
    k = F.k
    m = np.zeros((k, k), dtype=np.int64)
    for j in range(k):
        m[:, j] = F.digits(F.pow(F.xpow(j), F.p**e) if k > 1 else 1)
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=64)
def get_gf(p: int, k: int) -> GF:
    return GF(p, k)


@dataclass(frozen=True)
class FieldParams:
    """Field context: F_{q^m} coefficients, q^s-th root of theta, default precision."""

    p: int
    q: int
    m: int = 1
    s: int = 0
    prec: int = 200

    def __post_init__(self):
        pp, e = _prime_power(self.q)
        if pp != self.p:
            raise FieldError(f"q={self.q} is not a power of p={self.p}")
        if self.m < 1:
            raise FieldError("m must be >= 1")
        if self.s < 0:
            raise FieldError("s must be >= 0")

    @classmethod
    def from_q(cls, q: int, m: int = 1, s: int = 0, prec: int = 200) -> "FieldParams":
        p, _ = _prime_power(q)
        return cls(p=p, q=q, m=m, s=s, prec=prec)

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.p, self.q, self.m, self.s)

    @cached_property
    def e(self) -> int:
        return _prime_power(self.q)[1]

    @cached_property
    def k(self) -> int:
        """Degree of F_{q^m} over F_p."""
        return self.e * self.m

    @cached_property
    def gf(self) -> GF:
        return get_gf(self.p, self.k)

    @cached_property
    def E(self) -> int:
        """-theta = v^(-E): the ramification index of the uniformizer v.

        ``E = (q^m - 1) q^s`` so that both ``(-theta)^(1/(q-1))`` and, for even
        m, ``(-theta)^(1/(q^2-1))`` are monomials in v."""
        return (self.q**self.m - 1) * self.q**self.s

    @cached_property
    def wstep(self) -> int:
        """-ord_v(w) = E / q^s."""
        return self.q**self.m - 1

    @cached_property
    def zdeg(self) -> int:
        """-ord_v((-theta)^(1/(q-1))) = E / (q-1)."""
        return self.E // (self.q - 1)

    @cached_property
    def wdeg(self) -> int:
        """w-degree of theta (theta = w^(q^s))."""
        return self.q**self.s

    @cached_property
    def eps(self) -> int:
        """Constant with eps^(q^s) = -1: image of w is eps * v^(-wstep)."""
        return self.gf.neg(1)

    def with_(self, **kw) -> "FieldParams":
        d = dict(p=self.p, q=self.q, m=self.m, s=self.s, prec=self.prec)
        d.update(kw)
        return FieldParams(**d)

    def twist_matrix(self, j: int) -> np.ndarray:
        """Digit matrix of c -> c^(q^j) on F_{q^m} (j may be negative)."""
        return self.gf.power_matrix(self.e * j)

    def twist_scalar(self, c: int, j: int) -> int:
        """c^(q^j) for c in F_{q^m}, j any integer (Frobenius has order m)."""
        jj = j % self.m
        return self.gf.pow(c, self.q**jj) if jj else c

    def fq_elements(self) -> list[int]:
        """Codes of the subfield F_q inside F_{q^m}."""
        F = self.gf
        return [c for c in range(F.order) if F.pow(c, self.q) == c]

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "m": self.m, "s": self.s}
