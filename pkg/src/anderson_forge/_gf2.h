/* Multiplication in GF(2)[x] on little-endian 64-bit word arrays:
 * carry-less 64x64 products (PCLMULQDQ when available) under Karatsuba. */
#ifndef ANDERSON_FORGE_GF2_H
#define ANDERSON_FORGE_GF2_H

#include <stdint.h>
#include <stdlib.h>
#include <string.h>

#if defined(__PCLMUL__)
#include <wmmintrin.h>
static inline void af_clmul64(uint64_t a, uint64_t b, uint64_t *lo, uint64_t *hi)
{
    __m128i r = _mm_clmulepi64_si128(_mm_cvtsi64_si128((long long)a),
                                     _mm_cvtsi64_si128((long long)b), 0);
    *lo = (uint64_t)_mm_cvtsi128_si64(r);
    *hi = (uint64_t)_mm_cvtsi128_si64(_mm_unpackhi_epi64(r, r));
}
#define AF_GF2_HW 1
#else
static inline void af_clmul64(uint64_t a, uint64_t b, uint64_t *lo, uint64_t *hi)
{
    uint64_t l = 0, h = 0;
    for (int i = 0; i < 64; i++) {
        if ((b >> i) & 1) {
            l ^= a << i;
            if (i) h ^= a >> (64 - i);
        }
    }
    *lo = l;
    *hi = h;
}
#define AF_GF2_HW 0
#endif

#define AF_KARA_CUTOFF 24

/* r[0 .. na+nb) ^= a * b */
static void af_gf2_school(const uint64_t *a, size_t na, const uint64_t *b, size_t nb, uint64_t *r)
{
    for (size_t i = 0; i < na; i++) {
        uint64_t ai = a[i];
        if (!ai) continue;
        for (size_t j = 0; j < nb; j++) {
            uint64_t lo, hi;
            af_clmul64(ai, b[j], &lo, &hi);
            r[i + j] ^= lo;
            r[i + j + 1] ^= hi;
        }
    }
}

/* r[0 .. 2n) ^= a * b for a, b of n words; returns -1 on allocation failure */
static int af_gf2_kara(const uint64_t *a, const uint64_t *b, size_t n, uint64_t *r)
{
    if (n <= AF_KARA_CUTOFF) {
        af_gf2_school(a, n, b, n, r);
        return 0;
    }
    size_t h = n / 2, m = n - h;
    uint64_t *buf = (uint64_t *)calloc(8 * m, sizeof(uint64_t));
    if (!buf) return -1;
    uint64_t *p0 = buf, *p2 = buf + 2 * m, *p1 = buf + 4 * m, *sa = buf + 6 * m, *sb = buf + 7 * m;
    int err = 0;
    err |= af_gf2_kara(a, b, h, p0);
    err |= af_gf2_kara(a + h, b + h, m, p2);
    for (size_t i = 0; i < m; i++) {
        sa[i] = a[h + i] ^ (i < h ? a[i] : 0);
        sb[i] = b[h + i] ^ (i < h ? b[i] : 0);
    }
    err |= af_gf2_kara(sa, sb, m, p1);
    for (size_t i = 0; i < 2 * m; i++) {
        uint64_t mid = p1[i] ^ p2[i] ^ (i < 2 * h ? p0[i] : 0);
        r[h + i] ^= mid;
    }
    for (size_t i = 0; i < 2 * h; i++) r[i] ^= p0[i];
    for (size_t i = 0; i < 2 * m; i++) r[2 * h + i] ^= p2[i];
    free(buf);
    return err;
}

/* r[0 .. na+nb) ^= a * b for arbitrary lengths */
static int af_gf2_mul(const uint64_t *a, size_t na, const uint64_t *b, size_t nb, uint64_t *r)
{
    if (na < nb) {
        const uint64_t *t = a; a = b; b = t;
        size_t tn = na; na = nb; nb = tn;
    }
    if (nb == 0) return 0;
    if (nb <= AF_KARA_CUTOFF) {
        af_gf2_school(a, na, b, nb, r);
        return 0;
    }
    size_t off = 0;
    for (; off + nb <= na; off += nb)
        if (af_gf2_kara(a + off, b, nb, r + off)) return -1;
    if (off < na)
        return af_gf2_mul(b, nb, a + off, na - off, r + off);
    return 0;
}

#endif
