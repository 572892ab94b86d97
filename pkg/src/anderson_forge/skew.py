"""Twisted polynomial matrices in tau (``tau c = c^(1) tau``) and sigma (``sigma c = c^(-1) sigma``).

A :class:`SkewMatrix` is a list of equally shaped coefficient matrices, the
k-th one multiplying ``var^k``.  Entries can be any ring element supporting
``+ - * twist is_zero`` (AlgCoeff, CFrac, LaurentApprox, ...).

Also here: the ``*`` anti-isomorphism from tau-matrices to sigma-matrices,
the t-action ``h -> h phi(t)^*`` on sigma-rows, and the reduction modulo
``(sigma - 1)`` that identifies sigma-rows with points ``sum_i C_i^(i)``.
"""

from __future__ import annotations

from typing import Any, Callable, Sequence

from . import matrix as M
from .algebra import AlgCoeff
from .errors import ParseError
from .ff import FieldParams

Matrix = M.Matrix


def _zero_like(x) -> Any:
    return x - x


class SkewMatrix:
    """Sum of ``coeffs[k] * var^k``; ``sign`` is +1 for tau, -1 for sigma."""

    sign = 0
    var = ""

    def __init__(self, coeffs: Sequence[Matrix], zero=None):
        coeffs = [list(map(list, c)) for c in coeffs]
        if not coeffs:
            raise ValueError("a skew matrix needs at least one coefficient matrix")
        shapes = {M.shape(c) for c in coeffs}
        if len(shapes) != 1:
            raise ValueError("coefficient matrices must share a shape")
        self.zero = zero if zero is not None else _zero_like(coeffs[0][0][0])
        while len(coeffs) > 1 and M.is_zero_matrix(coeffs[-1]):
            coeffs.pop()
        self.coeffs = coeffs

    # ---------------------------------------------------------- builders
    @classmethod
    def const(cls, A: Matrix, zero=None):
        return cls([A], zero)

    @classmethod
    def identity(cls, n: int, one, zero):
        return cls([M.identity(n, one, zero)], zero)

    @classmethod
    def monomial(cls, A: Matrix, k: int, zero=None):
        zero = zero if zero is not None else _zero_like(A[0][0])
        n, m = M.shape(A)
        return cls([M.zeros(n, m, zero) for _ in range(k)] + [A], zero)

    # ----------------------------------------------------------- queries
    @property
    def shape(self) -> tuple[int, int]:
        return M.shape(self.coeffs[0])

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and M.is_zero_matrix(self.coeffs[0])

    def coeff(self, k: int) -> Matrix:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        n, m = self.shape
        return M.zeros(n, m, self.zero)

    def entry(self, i: int, j: int) -> list:
        """The (i, j) entry as a coefficient list in ``var``."""
        return [c[i][j] for c in self.coeffs]

    # -------------------------------------------------------- arithmetic
    def _same(self, other) -> None:
        if type(self) is not type(other):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")

    def __add__(self, other):
        self._same(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return type(self)([M.add(self.coeff(k), other.coeff(k)) for k in range(n)], self.zero)

    def __neg__(self):
        return type(self)([M.neg(c) for c in self.coeffs], self.zero)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SkewMatrix):
            return type(self)([M.scale(c, other) for c in self.coeffs], self.zero)
        self._same(other)
        n, _ = self.shape
        _, m = other.shape
        out = [M.zeros(n, m, self.zero) for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, A in enumerate(self.coeffs):
            if M.is_zero_matrix(A):
                continue
            for j, B in enumerate(other.coeffs):
                if M.is_zero_matrix(B):
                    continue
                Bt = M.twist(B, self.sign * i) if i else B
                out[i + j] = M.add(out[i + j], M.mul(A, Bt, self.zero))
        return type(self)(out, self.zero)

    def __rmul__(self, c):
        return type(self)([M.scale(A, c) for A in self.coeffs], self.zero)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        rows, _ = self.shape
        one = type(self.zero).one(self.zero.F)
        out = type(self).identity(rows, one, self.zero)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewMatrix) or type(self) is not type(other):
            return NotImplemented
        if self.shape != other.shape:
            return False
        n = max(len(self.coeffs), len(other.coeffs))
        return all(M.equal(self.coeff(k), other.coeff(k)) for k in range(n))

    __hash__ = None  # type: ignore[assignment]

    def twist(self, j: int = 1):
        return type(self)([M.twist(c, j) for c in self.coeffs], self.zero)

    def map_entries(self, f: Callable):
        return type(self)([M.mat_map(c, f) for c in self.coeffs], f(self.zero))

    def transpose_coeffs(self):
        return type(self)([M.transpose(c) for c in self.coeffs], self.zero)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shape={self.shape}, degree={self.degree})"

    # -------------------------------------------------------------- json
    def to_json(self) -> dict:
        return {
            "var": self.var,
            "shape": list(self.shape),
            "coeffs": [[[x.to_json() for x in row] for row in c] for c in self.coeffs],
        }

    @staticmethod
    def from_json(obj: dict, F: FieldParams | None = None) -> "SkewMatrix":
        try:
            cls = {"tau": TauMatrix, "sigma": SigmaMatrix}[obj["var"]]
            coeffs = [[[AlgCoeff.from_json(x, F) for x in row] for row in c] for c in obj["coeffs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed skew-polynomial JSON: {exc}") from exc
        if list(M.shape(coeffs[0])) != list(obj.get("shape", M.shape(coeffs[0]))):
            raise ParseError("declared shape does not match coefficients")
        return cls(coeffs)


class TauMatrix(SkewMatrix):
    """Matrices in ``K[tau]`` with ``tau B = B^(1) tau``."""

    sign = 1
    var = "tau"

    def apply(self, x: Sequence) -> list:
        """Evaluate on a column vector: ``sum_k A_k x^(k)``."""
        n, m = self.shape
        if len(x) != m:
            raise ValueError("vector length does not match the matrix")
        out = [self.zero] * n
        for k, A in enumerate(self.coeffs):
            xk = [xi.twist(k) for xi in x] if k else list(x)
            for i in range(n):
                acc = out[i]
                for j in range(m):
                    a = A[i][j]
                    if not M._is_zero(a) and not M._is_zero(xk[j]):
                        acc = acc + a * xk[j]
                out[i] = acc
        return out


class SigmaMatrix(SkewMatrix):
    """Matrices in ``K[sigma]`` with ``sigma g = g^(-1) sigma``; rows are 1 x d."""

    sign = -1
    var = "sigma"


SigmaRow = SigmaMatrix
TauPoly = TauMatrix
SigmaPoly = SigmaMatrix


def star(B: TauMatrix) -> SigmaMatrix:
    """``(sum a_i tau^i)^* = sum a_i^(-i) sigma^i`` entrywise, with transposed entries."""
    if not isinstance(B, TauMatrix):
        raise TypeError("star expects a TauMatrix")
    coeffs = [M.transpose(M.twist(A, -i) if i else A) for i, A in enumerate(B.coeffs)]
    return SigmaMatrix(coeffs, B.zero)


def sigma_t_action(h: SigmaMatrix, phi_t: TauMatrix) -> SigmaMatrix:
    """``t . h = h phi(t)^*`` for ``h`` a 1 x d sigma-row."""
    return h * star(phi_t)


def sigma_reduce(h: SigmaMatrix) -> list:
    """Representative of ``h`` modulo ``(sigma - 1)``: ``sum_i C_i^(i)`` (a row vector)."""
    rows, d = h.shape
    out = [[h.zero] * d for _ in range(rows)]
    for i, C in enumerate(h.coeffs):
        Ci = M.twist(C, i) if i else C
        out = M.add(out, Ci)
    return out[0] if rows == 1 else out


def basis_row(d: int, j: int, one, zero) -> SigmaMatrix:
    """``s_{j,d}``: the j-th standard row (1-based) of length d, as a sigma-row."""
    return SigmaMatrix([[[one if k == j - 1 else zero for k in range(d)]]], zero)
