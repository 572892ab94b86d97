"""Small dense matrices over any of the package's rings (lists of lists).

Elements must support ``+ - *`` and ``is_zero()``; ``twist`` is used by
:func:`twist`.  Sizes here are tiny (rank r <= 5, dimensions d <= ~12), so
plain cofactor/elimination algorithms are adequate.
"""

from __future__ import annotations

from itertools import combinations
from typing import Any, Callable, Sequence

Matrix = list[list[Any]]


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def zeros(n: int, m: int, zero) -> Matrix:
    return [[zero for _ in range(m)] for _ in range(n)]


def identity(n: int, one, zero) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)] if A else []


def add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def neg(A: Matrix) -> Matrix:
    return [[-a for a in r] for r in A]


def scale(A: Matrix, c) -> Matrix:
    return [[c * a for a in r] for r in A]


def mul(A: Matrix, B: Matrix, zero=None) -> Matrix:
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} * {k2}x{m}")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = zero
            for t in range(k):
                a = A[i][t]
                if _is_zero(a):
                    continue
                b = B[t][j]
                if _is_zero(b):
                    continue
                acc = a * b if acc is None else acc + a * b
            if acc is None:
                acc = zero if zero is not None else A[i][0] * B[0][j]
            row.append(acc)
        out.append(row)
    return out


def _is_zero(x) -> bool:
    f = getattr(x, "is_zero", None)
    if f is not None:
        return f()
    return x == 0


def mat_map(A: Matrix, f: Callable) -> Matrix:
    return [[f(a) for a in r] for r in A]


def twist(A: Matrix, j: int = 1) -> Matrix:
    return [[a.twist(j) for a in r] for r in A]


def equal(A: Matrix, B: Matrix) -> bool:
    return shape(A) == shape(B) and all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def is_zero_matrix(A: Matrix) -> bool:
    return all(_is_zero(a) for r in A for a in r)


def det(A: Matrix, zero=None, one=None):
    """Determinant by Laplace expansion with subset memoisation (ring-safe)."""
    n = len(A)
    if n == 0:
        return one
    memo: dict[tuple[int, ...], Any] = {}

    def minor(rows_start: int, cols: tuple[int, ...]):
        if len(cols) == 1:
            return A[rows_start][cols[0]]
        key = cols
        if key in memo:
            return memo[key]
        acc = None
        for idx, c in enumerate(cols):
            a = A[rows_start][c]
            if _is_zero(a):
                continue
            sub_cols = cols[:idx] + cols[idx + 1 :]
            term = a * minor(rows_start + 1, sub_cols)
            if idx % 2:
                term = -term
            acc = term if acc is None else acc + term
        if acc is None:
            acc = zero if zero is not None else A[0][0] - A[0][0]
        memo[key] = acc
        return acc

    return minor(0, tuple(range(n)))


def minor_matrix(A: Matrix, i: int, j: int) -> Matrix:
    return [[A[r][c] for c in range(len(A)) if c != j] for r in range(len(A)) if r != i]


def adjugate(A: Matrix, zero=None, one=None) -> Matrix:
    """adj(A) with A * adj(A) = det(A) * Id."""
    n = len(A)
    if n == 1:
        return [[one]]
    cof = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            d = det(minor_matrix(A, i, j), zero, one)
            cof[i][j] = -d if (i + j) % 2 else d
    return transpose(cof)


def inverse_field(A: Matrix, zero, one) -> Matrix:
    """Gauss-Jordan inverse over a field (elements support ``/``)."""
    n = len(A)
    M = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not _is_zero(M[r][col])), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = one / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and not _is_zero(M[r][col]):
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [r[n:] for r in M]


def block(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix from a grid of matrices."""
    out: Matrix = []
    for brow in blocks:
        h = len(brow[0])
        for i in range(h):
            row = []
            for B in brow:
                row.extend(B[i])
            out.append(row)
    return out


def submatrix(A: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return [[A[i][j] for j in cols] for i in rows]


def wedge_basis(r: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(r), k))
