"""Pure-Python (numpy) implementations of the hot loops.

Same contracts as the compiled ``_ckernels`` module; selected at import
time when the extension is unavailable or ``ANDERSON_FORGE_PURE=1``.
"""

from __future__ import annotations

import numpy as np


def conv_planes(a: np.ndarray, b: np.ndarray, red: np.ndarray, p: int, nout: int) -> np.ndarray:
    k = a.shape[0]
    a = a[:, :nout]
    b = b[:, :nout]
    raw = np.zeros((2 * k - 1, nout), dtype=np.int64)
    if a.shape[1] and b.shape[1]:
        for i in range(k):
            ai = a[i]
            if not ai.any():
                continue
            for j in range(k):
                c = np.convolve(ai, b[j])[:nout]
                raw[i + j, : c.shape[0]] += c
    raw %= p
    if k == 1:
        return raw
    return (red @ raw) % p


def divmod_prime(a: np.ndarray, b: np.ndarray, p: int):
    na, nb = a.shape[0], b.shape[0]
    rem = np.array(a, dtype=np.int64)
    if na < nb:
        return np.zeros(0, dtype=np.int64), rem
    quo = np.zeros(na - nb + 1, dtype=np.int64)
    inv_lead = pow(int(b[-1]) % p, p - 2, p)
    for shift in range(na - nb, -1, -1):
        c = (int(rem[shift + nb - 1]) * inv_lead) % p
        quo[shift] = c
        if c:
            seg = rem[shift : shift + nb]
            seg -= c * b
            seg %= p
    return quo, rem[: nb - 1].copy()
