"""Dense univariate polynomials over F_{p^k} in digit-plane layout.

A polynomial is an int64 array of shape ``(k, n)``: column ``j`` holds the
digits of the coefficient of ``X**j``.  Arrays are kept *trimmed* (no trailing
zero columns); the zero polynomial has ``n == 0``.  Every function here is
pure and returns fresh arrays.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .ff import GF


def zeros(F: GF, n: int = 0) -> np.ndarray:
    return np.zeros((F.k, n), dtype=np.int64)


def trim(a: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0 or a[:, -1].any():
        return a
    nz = np.flatnonzero(a.any(axis=0))
    if nz.size == 0:
        return a[:, :0]
    return a[:, : nz[-1] + 1]


def low_order(a: np.ndarray) -> int:
    """Index of the first nonzero column (``a.shape[1]`` if zero)."""
    nz = np.flatnonzero(a.any(axis=0))
    return int(nz[0]) if nz.size else a.shape[1]


def const(F: GF, c: int) -> np.ndarray:
    if c % F.order == 0:
        return zeros(F)
    return np.array(F.digits(c), dtype=np.int64).reshape(F.k, 1)


def monomial(F: GF, c: int, e: int) -> np.ndarray:
    if c == 0:
        return zeros(F)
    out = zeros(F, e + 1)
    out[:, e] = F.digits(c)
    return out


def coeff(F: GF, a: np.ndarray, j: int) -> int:
    if j < 0 or j >= a.shape[1]:
        return 0
    return F.from_digits(a[:, j])


def lead(F: GF, a: np.ndarray) -> int:
    return F.from_digits(a[:, -1]) if a.shape[1] else 0


def add(F: GF, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    na, nb = a.shape[1], b.shape[1]
    if na < nb:
        a, b, na, nb = b, a, nb, na
    out = a.copy()
    out[:, :nb] += b
    out[:, :nb] %= F.p
    return trim(out) if na == nb else out


def neg(F: GF, a: np.ndarray) -> np.ndarray:
    return (-a) % F.p


def sub(F: GF, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return add(F, a, neg(F, b))


def scale(F: GF, a: np.ndarray, c: int) -> np.ndarray:
    if c == 0 or a.shape[1] == 0:
        return zeros(F)
    if c == 1:
        return a.copy()
    if F.k == 1:
        return (a * c) % F.p
    return (F.scalar_matrix(c) @ a) % F.p


def linmap(F: GF, a: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Apply an F_p-linear map (k x k digit matrix) to every coefficient."""
    if F.k == 1:
        return (a * int(M[0, 0])) % F.p
    return trim((M @ a) % F.p)


def matmul(F: GF, A: list, B: list) -> list:
    """Product of matrices whose entries are plane polynomials."""
    return [[trim(x) for x in row] for row in kernels.kronecker_matmul(A, B, F.reduction, F.p)]


def mul(F: GF, a: np.ndarray, b: np.ndarray, nout: int | None = None) -> np.ndarray:
    na, nb = a.shape[1], b.shape[1]
    if na == 0 or nb == 0:
        return zeros(F)
    full = na + nb - 1
    n = full if nout is None else min(full, nout)
    if n <= 0:
        return zeros(F)
    if na == 1 or nb == 1:
        if nb == 1:
            a, b = b, a
        c = F.from_digits(a[:, 0])
        return trim(scale(F, b[:, :n], c))
    return trim(kernels.conv_planes(a, b, F.reduction, F.p, n))


def shift(F: GF, a: np.ndarray, e: int) -> np.ndarray:
    """Multiply by X**e (e >= 0)."""
    if a.shape[1] == 0 or e == 0:
        return a
    out = zeros(F, a.shape[1] + e)
    out[:, e:] = a
    return out


def stretch(F: GF, a: np.ndarray, g: int) -> np.ndarray:
    """Substitute X -> X**g."""
    n = a.shape[1]
    if n <= 1 or g == 1:
        return a.copy()
    out = zeros(F, (n - 1) * g + 1)
    out[:, ::g] = a
    return out


def compress(F: GF, a: np.ndarray, g: int) -> np.ndarray | None:
    """Inverse of :func:`stretch`; ``None`` if some exponent is not divisible by g."""
    if g == 1 or a.shape[1] <= 1:
        return a.copy()
    mask = np.ones(a.shape[1], dtype=bool)
    mask[::g] = False
    if a[:, mask].any():
        return None
    return a[:, ::g].copy()


def exponent_gcd(a: np.ndarray) -> int:
    """gcd of exponents carrying nonzero coefficients (0 for constants)."""
    from math import gcd

    idx = np.flatnonzero(a.any(axis=0))
    g = 0
    for i in idx.tolist():
        g = gcd(g, i)
        if g == 1:
            break
    return g


def divmod_(F: GF, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nb = b.shape[1]
    if nb == 0:
        raise ZeroDivisionError("polynomial division by zero")
    na = a.shape[1]
    if na < nb:
        return zeros(F), a.copy()
    if F.k == 1:
        q, r = kernels.divmod_prime(a[0], b[0], F.p)
        return trim(q.reshape(1, -1)), trim(r.reshape(1, -1))
    p = F.p
    rem = a.copy()
    quo = zeros(F, na - nb + 1)
    inv_lead = F.inv(lead(F, b))
    # sparse divisors (e.g. theta^(q^i) - theta) are common: only touch their support
    support = np.flatnonzero(b.any(axis=0))
    bs = b[:, support]
    for sh in range(na - nb, -1, -1):
        top = F.from_digits(rem[:, sh + nb - 1])
        if top == 0:
            continue
        c = F.mul(top, inv_lead)
        quo[:, sh] = F.digits(c)
        rem[:, sh + support] = (rem[:, sh + support] - F.scalar_matrix(c) @ bs) % p
    return trim(quo), trim(rem[:, : nb - 1])


def monic(F: GF, a: np.ndarray) -> tuple[np.ndarray, int]:
    """Return (monic multiple of a, leading coefficient)."""
    lc = lead(F, a)
    if lc in (0, 1):
        return a.copy(), lc
    return scale(F, a, F.inv(lc)), lc


def gcd(F: GF, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Monic gcd."""
    while b.shape[1]:
        a, b = b, divmod_(F, a, b)[1]
    return monic(F, a)[0] if a.shape[1] else a


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool(np.array_equal(a, b))


def evaluate_code(F: GF, a: np.ndarray, x: int) -> int:
    acc = 0
    for j in range(a.shape[1] - 1, -1, -1):
        acc = F.add(F.mul(acc, x), F.from_digits(a[:, j]))
    return acc
