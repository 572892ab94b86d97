"""Backend selection for the arithmetic hot loops.

The compiled extension ``_ckernels`` is used when it imports and the
environment variable ``ANDERSON_FORGE_PURE`` is unset; otherwise the numpy
fallback in ``_pykernels`` is used.  Very large products bypass both and go
through Kronecker substitution on big integers (GMP when ``gmpy2`` exists),
which is asymptotically faster than any schoolbook loop.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:  # pragma: no cover - exercised implicitly by whichever backend loads
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover
    gmpy2 = None
    _mpz = int

_backend = _pykernels
BACKEND = "python"
if not os.environ.get("ANDERSON_FORGE_PURE"):
    try:
        from . import _ckernels as _compiled  # type: ignore[attr-defined]

        _backend = _compiled
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        pass

def _gf2_available() -> bool:
    return hasattr(_backend, "gf2_mul")


def bits_to_words(a: np.ndarray) -> np.ndarray:
    """A 0/1 coefficient row as little-endian packed uint64 words."""
    packed = np.packbits(a.astype(np.uint8), bitorder="little")
    pad = (-len(packed)) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
    return packed.view(np.uint64)


def words_to_bits(w: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(w.view(np.uint8), bitorder="little", count=n).astype(np.int64)


def gf2_mul_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Untruncated product of two 0/1 rows over GF(2) (compiled backend only)."""
    n = len(a) + len(b) - 1
    return words_to_bits(_backend.gf2_mul(bits_to_words(a), bits_to_words(b)), n)


# Products whose schoolbook cost exceeds this many digit products go through
# Kronecker substitution.
KRONECKER_THRESHOLD = 40_000


def use_backend(name: str) -> None:
    """Force a backend ('cython' or 'python'); used by the benchmark."""
    global _backend, BACKEND
    if name == "python":
        _backend, BACKEND = _pykernels, "python"
    elif name == "cython":
        from . import _ckernels as _compiled  # type: ignore[attr-defined]

        _backend, BACKEND = _compiled, "cython"
    else:
        raise ValueError(name)


def _pack(arr: np.ndarray, nbytes: int) -> int:
    b = np.ascontiguousarray(arr.astype("<u8").view(np.uint8).reshape(-1, 8)[:, :nbytes]).tobytes()
    return _mpz(int.from_bytes(b, "little")) if gmpy2 is not None and len(b) > 20000 else int.from_bytes(b, "little")


def _unpack(x, nbytes: int, count: int) -> np.ndarray:
    raw = int(x).to_bytes(count * nbytes, "little")
    u8 = np.frombuffer(raw, dtype=np.uint8).reshape(count, nbytes)
    out = np.zeros((count, 8), dtype=np.uint8)
    out[:, :nbytes] = u8
    return out.view("<u8").reshape(count).astype(np.int64)


def kronecker_planes(a: np.ndarray, b: np.ndarray, red: np.ndarray, p: int, nout: int) -> np.ndarray:
    """Truncated product of plane arrays by a single big-integer multiplication.

    Digit ``j`` of coefficient ``i`` is placed in slot ``i*(2k-1) + j`` so that
    both the series variable and the field generator are substituted at once.
    """
    k = a.shape[0]
    a = a[:, :nout]
    b = b[:, :nout]
    na, nb = a.shape[1], b.shape[1]
    if na == 0 or nb == 0:
        return np.zeros((k, nout), dtype=np.int64)
    w = 2 * k - 1
    bound = min(na, nb) * k * (p - 1) ** 2 + 1
    nbytes = max(1, (bound.bit_length() + 7) // 8)
    sa = np.zeros((na, w), dtype=np.int64)
    sa[:, :k] = a.T
    sb = np.zeros((nb, w), dtype=np.int64)
    sb[:, :k] = b.T
    prod = _pack(sa.reshape(-1), nbytes) * _pack(sb.reshape(-1), nbytes)
    m = min(na + nb - 1, nout)
    raw = _unpack(prod, nbytes, (na + nb - 1) * w)
    grid = raw[: m * w].reshape(m, w).T % p
    out = np.zeros((k, nout), dtype=np.int64)
    if k == 1:
        out[:, :m] = grid
    else:
        out[:, :m] = (red @ grid) % p
    return out


def conv_planes(a: np.ndarray, b: np.ndarray, red: np.ndarray, p: int, nout: int) -> np.ndarray:
    """``(a*b)`` truncated to ``nout`` coefficients; all inputs digit planes."""
    na = min(a.shape[1], nout)
    nb = min(b.shape[1], nout)
    if na == 0 or nb == 0 or nout <= 0:
        return np.zeros((a.shape[0], max(nout, 0)), dtype=np.int64)
    k = a.shape[0]
    if p == 2 and k == 1 and min(na, nb) > 64 and _gf2_available():
        out = np.zeros((1, nout), dtype=np.int64)
        prod = gf2_mul_rows(a[0, :na], b[0, :nb])
        m = min(len(prod), nout)
        out[0, :m] = prod[:m]
        return out
    if na * nb * k * k > KRONECKER_THRESHOLD and min(na, nb) > 8:
        return kronecker_planes(a, b, red, p, nout)
    return _backend.conv_planes(
        np.ascontiguousarray(a[:, :na], dtype=np.int64),
        np.ascontiguousarray(b[:, :nb], dtype=np.int64),
        red,
        p,
        nout,
    )


def divmod_prime(a: np.ndarray, b: np.ndarray, p: int):
    return _backend.divmod_prime(
        np.ascontiguousarray(a, dtype=np.int64), np.ascontiguousarray(b, dtype=np.int64), p
    )


def _pack_block(polys: list, order: list[int], S: int, w: int, nbytes: int) -> int:
    """Pack ``polys[order[0]], polys[order[1]], ...`` into consecutive blocks of S slots."""
    k = polys[order[0]].shape[0] if order else 1
    buf = np.zeros((len(order), S, w), dtype=np.int64)
    for blk, t in enumerate(order):
        a = polys[t]
        if a.shape[1]:
            buf[blk, : a.shape[1], :k] = a.T
    return _pack(buf.reshape(-1), nbytes)


def kronecker_matmul(L: list, R: list, red: np.ndarray, p: int) -> list:
    """Matrix product of plane-polynomial matrices (untruncated).

    Row r of L and column c of R (in reverse order) are each packed into one
    integer; block ``d-1`` of their product is ``sum_t L[r][t] R[t][c]``.
    """
    n, d = len(L), len(R)
    m = len(R[0]) if d else 0
    k = red.shape[0]
    if p == 2 and k == 1 and _gf2_available():
        return _gf2_matmul(L, R)
    la = max((a.shape[1] for row in L for a in row), default=0)
    lb = max((b.shape[1] for row in R for b in row), default=0)
    if la == 0 or lb == 0:
        return [[np.zeros((k, 0), dtype=np.int64) for _ in range(m)] for _ in range(n)]
    w = 2 * k - 1
    S = la + lb - 1
    bound = d * min(la, lb) * k * (p - 1) ** 2 + 1
    nbytes = max(1, (bound.bit_length() + 7) // 8)
    blockbits = S * w * nbytes * 8
    rows = [_pack_block(L[r], list(range(d)), S, w, nbytes) for r in range(n)]
    cols = [_pack_block([R[t][c] for t in range(d)], list(range(d - 1, -1, -1)), S, w, nbytes) for c in range(m)]
    mask = (_mpz(1) << blockbits) - 1
    out = []
    for r in range(n):
        out_row = []
        for c in range(m):
            if not rows[r] or not cols[c]:
                out_row.append(np.zeros((k, 0), dtype=np.int64))
                continue
            blk = ((rows[r] * cols[c]) >> ((d - 1) * blockbits)) & mask
            raw = _unpack(blk, nbytes, S * w)
            grid = raw.reshape(S, w).T % p
            res = grid[:k] if k == 1 else (red @ grid) % p
            out_row.append(np.ascontiguousarray(res))
        out.append(out_row)
    return out


def _gf2_matmul(L: list, R: list) -> list:
    """``kronecker_matmul`` over GF(2): packed words, XOR accumulation."""
    Lw = [[bits_to_words(a[0]) if a.shape[1] else None for a in row] for row in L]
    Rw = [[bits_to_words(b[0]) if b.shape[1] else None for b in row] for row in R]
    out = []
    for r, row in enumerate(Lw):
        out_row = []
        for c in range(len(R[0])):
            acc = None
            n = 0
            for t, a in enumerate(row):
                b = Rw[t][c]
                if a is None or b is None:
                    continue
                prod = _backend.gf2_mul(a, b)
                n = max(n, L[r][t].shape[1] + R[t][c].shape[1] - 1)
                if acc is None:
                    acc = prod
                else:
                    if len(prod) > len(acc):
                        acc, prod = prod, acc
                    acc[: len(prod)] ^= prod
            if acc is None:
                out_row.append(np.zeros((1, 0), dtype=np.int64))
            else:
                out_row.append(words_to_bits(acc, n)[None, :])
        out.append(out_row)
    return out
