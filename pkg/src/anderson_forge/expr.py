"""A small expression grammar for command-line inputs.

Grammar (version 1)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("+" | "-") factor | atom ("^" int)?
    atom   := "theta" | "θ" | "w" | "t" | integer | "(" expr ")"

``theta`` (or ``θ``) is the base variable, ``w`` the chosen q^s-th root of
theta, ``t`` the motive variable (only where a polynomial in t is expected)
and integers are read modulo p.  Exponents are (possibly negative) integer
literals; ``**`` is accepted as a synonym of ``^``.

Parsing is delegated to :mod:`ast` on a whitelisted node set; nothing is
evaluated by Python itself.
"""

from __future__ import annotations

import ast

from .algebra import AlgCoeff, AlgFrac
from .errors import ParseError
from .ff import FieldParams
from .tate import TateSeries

GRAMMAR_VERSION = 1

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _tree(text: str) -> ast.AST:
    src = text.strip().replace("θ", "theta").replace("^", "**")
    if not src:
        raise ParseError("empty expression")
    try:
        return ast.parse(src, mode="eval").body
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None


def _int_literal(node: ast.AST) -> int:
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _int_literal(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return node.value
    raise ParseError("exponents must be integer literals")


class _TPoly:
    """Polynomial in t with AlgFrac coefficients (dense, low degree first)."""

    __slots__ = ("F", "c")

    def __init__(self, F: FieldParams, c: list[AlgFrac]):
        while c and c[-1].is_zero():
            c = c[:-1]
        self.F, self.c = F, c

    def _get(self, i: int) -> AlgFrac:
        return self.c[i] if i < len(self.c) else AlgFrac.zero(self.F)

    def __add__(self, o: "_TPoly") -> "_TPoly":
        n = max(len(self.c), len(o.c))
        return _TPoly(self.F, [self._get(i) + o._get(i) for i in range(n)])

    def __neg__(self) -> "_TPoly":
        return _TPoly(self.F, [-x for x in self.c])

    def __mul__(self, o: "_TPoly") -> "_TPoly":
        if not self.c or not o.c:
            return _TPoly(self.F, [])
        out = [AlgFrac.zero(self.F)] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            for j, b in enumerate(o.c):
                out[i + j] = out[i + j] + a * b
        return _TPoly(self.F, out)

    def constant(self) -> AlgFrac | None:
        if len(self.c) <= 1:
            return self._get(0)
        return None


def _eval(node: ast.AST, F: FieldParams, allow_t: bool) -> _TPoly:
    const = lambda x: _TPoly(F, [x])  # noqa: E731
    if isinstance(node, ast.Constant):
        if type(node.value) is not int:
            raise ParseError(f"unsupported literal {node.value!r}")
        return const(AlgFrac.of(node.value, F))
    if isinstance(node, ast.Name):
        if node.id == "theta":
            return const(AlgFrac.theta(F))
        if node.id == "w":
            return const(AlgFrac.of(AlgCoeff.w(F), F))
        if node.id == "t" and allow_t:
            return _TPoly(F, [AlgFrac.zero(F), AlgFrac.one(F)])
        raise ParseError(f"unknown symbol {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, F, allow_t)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        if isinstance(node.op, ast.Pow):
            base = _eval(node.left, F, allow_t)
            e = _int_literal(node.right)
            if e < 0:
                b = base.constant()
                if b is None:
                    raise ParseError("negative powers of t are not polynomials")
                if b.is_zero():
                    raise ParseError("zero raised to a negative power")
                return const(b**e)
            out = const(AlgFrac.one(F))
            for _ in range(e):
                out = out * base
            return out
        left = _eval(node.left, F, allow_t)
        right = _eval(node.right, F, allow_t)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left + (-right)
        if isinstance(node.op, ast.Mult):
            return left * right
        d = right.constant()
        if d is None:
            raise ParseError("division by a polynomial in t")
        if d.is_zero():
            raise ParseError("division by zero")
        return left * const(d.inverse())
    raise ParseError(f"unsupported syntax {type(node).__name__}")


def parse_alg(text: str, F: FieldParams) -> AlgFrac:
    """Parse an element of K(w) = F_{q^m}(theta^(1/q^s))."""
    v = _eval(_tree(text), F, allow_t=False).constant()
    assert v is not None
    return v


def parse_tpoly(text: str, F: FieldParams) -> TateSeries:
    """Parse a polynomial in t with coefficients in K(w)."""
    p = _eval(_tree(text), F, allow_t=True)
    return TateSeries(F, list(p.c) or [AlgFrac.zero(F)])


def parse_list(text: str, F: FieldParams) -> list[AlgFrac]:
    """Comma-separated list of elements."""
    parts = [x for x in text.split(",")]
    if any(not x.strip() for x in parts):
        raise ParseError(f"empty entry in list {text!r}")
    return [parse_alg(x, F) for x in parts]


__all__ = ["GRAMMAR_VERSION", "parse_alg", "parse_list", "parse_tpoly"]
