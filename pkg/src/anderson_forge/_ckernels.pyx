# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: truncated convolution and long division over F_p planes."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef long long i64


def conv_planes(const i64[:, ::1] a, const i64[:, ::1] b, const i64[:, ::1] red,
                i64 p, Py_ssize_t nout):
    """Product of two digit-plane arrays, truncated to ``nout`` columns.

    ``red`` maps the 2k-1 raw digit planes of the product back to k planes.
    """
    cdef Py_ssize_t k = a.shape[0]
    cdef Py_ssize_t na = a.shape[1]
    cdef Py_ssize_t nb = b.shape[1]
    cdef Py_ssize_t i, j, x, y, ylim, r
    cdef i64 ax, acc
    raw_arr = np.zeros((2 * k - 1, nout), dtype=np.int64)
    cdef i64[:, ::1] raw = raw_arr
    # periodic reduction keeps accumulators far from overflow
    cdef i64 lim = (<i64>1) << 60
    cdef i64 step = (p - 1) * (p - 1)
    if step == 0:
        step = 1
    cdef Py_ssize_t flush = <Py_ssize_t>(lim // step // (k if k > 0 else 1))
    for i in range(k):
        for j in range(k):
            for x in range(na if na < nout else nout):
                ax = a[i, x]
                if ax == 0:
                    continue
                ylim = nout - x
                if ylim > nb:
                    ylim = nb
                for y in range(ylim):
                    raw[i + j, x + y] += ax * b[j, y]
                if x % flush == flush - 1:
                    for r in range(nout):
                        raw[i + j, r] %= p
    out_arr = np.zeros((k, nout), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    for r in range(2 * k - 1):
        for x in range(nout):
            raw[r, x] %= p
    for i in range(k):
        for r in range(2 * k - 1):
            ax = red[i, r]
            if ax == 0:
                continue
            for x in range(nout):
                out[i, x] += ax * raw[r, x]
        for x in range(nout):
            out[i, x] %= p
    return out_arr


def divmod_prime(const i64[::1] a, const i64[::1] b, i64 p):
    """Long division over F_p (single plane); ``b`` must have a nonzero top."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t i, j, shift
    cdef i64 c, inv_lead
    rem_arr = np.array(a, dtype=np.int64)
    cdef i64[::1] rem = rem_arr
    if na < nb:
        return np.zeros(0, dtype=np.int64), rem_arr
    quo_arr = np.zeros(na - nb + 1, dtype=np.int64)
    cdef i64[::1] quo = quo_arr
    inv_lead = 1
    c = b[nb - 1] % p
    # Fermat inverse
    cdef i64 e = p - 2, base = c
    while e > 0:
        if e & 1:
            inv_lead = (inv_lead * base) % p
        base = (base * base) % p
        e >>= 1
    for shift in range(na - nb, -1, -1):
        c = (rem[shift + nb - 1] * inv_lead) % p
        quo[shift] = c
        if c == 0:
            continue
        for j in range(nb):
            rem[shift + j] = (rem[shift + j] - c * b[j]) % p
            if rem[shift + j] < 0:
                rem[shift + j] += p
    return quo_arr, rem_arr[:nb - 1].copy()


cdef extern from "_gf2.h":
    int af_gf2_mul(const unsigned long long *a, size_t na, const unsigned long long *b,
                   size_t nb, unsigned long long *r) nogil
    int AF_GF2_HW

GF2_HARDWARE = bool(AF_GF2_HW)


def gf2_mul(const unsigned long long[::1] a, const unsigned long long[::1] b):
    """Product in GF(2)[x] of bit-packed little-endian word arrays."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    out_arr = np.zeros(na + nb, dtype=np.uint64)
    if na == 0 or nb == 0:
        return out_arr
    cdef unsigned long long[::1] out = out_arr
    cdef int err
    with nogil:
        err = af_gf2_mul(&a[0], na, &b[0], nb, &out[0])
    if err:
        raise MemoryError("gf2_mul scratch allocation failed")
    return out_arr
