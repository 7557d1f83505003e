"""Sparse bivariate polynomials with exact rational coefficients."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import sympy
from sympy.polys.polyerrors import CoercionFailed

from .errors import ParseError

_X, _Y = sympy.symbols("x y")


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, sympy.Rational):
        return Fraction(int(c.p), int(c.q))
    if isinstance(c, float):
        raise TypeError("BiPoly coefficients must be exact")
    return Fraction(c)


@dataclass(frozen=True)
class BiPoly:
    """Polynomial sum c_ij x^i y^j stored as ``{(i, j): c_ij}`` without zeros."""

    terms: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), c in dict(self.terms).items():
            if i < 0 or j < 0:
                raise ValueError("exponents must be nonnegative")
            c = _frac(c)
            if c:
                clean[(int(i), int(j))] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    # construction
    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def parse(cls, text: str) -> "BiPoly":
        """Parse e.g. ``"1 - x - y*x^2"``; only x and y are allowed."""
        try:
            expr = sympy.sympify(str(text).replace("^", "**"),
                                 locals={"x": _X, "y": _Y}, rational=True)
            poly = sympy.Poly(sympy.expand(expr), _X, _Y, domain="QQ")
        except (sympy.SympifyError, sympy.PolynomialError, CoercionFailed, TypeError,
                SyntaxError) as exc:
            raise ParseError(f"cannot parse polynomial {text!r}: {exc}") from None
        return cls.from_sympy(poly)

    @classmethod
    def from_sympy(cls, poly) -> "BiPoly":
        if not isinstance(poly, sympy.Poly):
            poly = sympy.Poly(sympy.expand(poly), _X, _Y, domain="QQ")
        return cls({m: c for m, c in poly.terms()})

    def to_sympy(self) -> sympy.Poly:
        expr = sum((sympy.Rational(c.numerator, c.denominator) * _X**i * _Y**j
                    for (i, j), c in self.terms.items()), sympy.Integer(0))
        return sympy.Poly(expr, _X, _Y, domain="QQ")

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def deg_x(self) -> int:
        return max((i for i, _ in self.terms), default=0)

    @property
    def deg_y(self) -> int:
        return max((j for _, j in self.terms), default=0)

    def constant_term(self) -> Fraction:
        return self.terms.get((0, 0), Fraction(0))

    # arithmetic
    def __add__(self, other):
        other = _lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out: dict = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + a * b
        return BiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = BiPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def diff_x(self) -> "BiPoly":
        return BiPoly({(i - 1, j): i * c for (i, j), c in self.terms.items() if i})

    def diff_y(self) -> "BiPoly":
        return BiPoly({(i, j - 1): j * c for (i, j), c in self.terms.items() if j})

    def scale_vars(self, a, b) -> "BiPoly":
        """Return P(a*x, b*y) for rational a, b."""
        a, b = _frac(a), _frac(b)
        return BiPoly({(i, j): c * a**i * b**j for (i, j), c in self.terms.items()})

    def __call__(self, x, y):
        """Evaluate at exact numbers (int, Fraction, mpq)."""
        total = 0
        for (i, j), c in self.terms.items():
            total = total + c * x**i * y**j
        return total

    def evaluate(self, x, y, ctx):
        """Evaluate in an mpmath context (``mpmath.mp`` or ``mpmath.iv``)."""
        total = ctx.mpf(0)
        for (i, j), c in self.terms.items():
            total += ctx.mpf(c.numerator) / c.denominator * x**i * y**j
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda t: (t[0][0] + t[0][1], t[0])):
            mono = "*".join(s for s in (_fmt_var("x", i), _fmt_var("y", j)) if s)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _fmt_var(v, k):
    return "" if k == 0 else (v if k == 1 else f"{v}^{k}")


def _lift(other) -> BiPoly:
    return other if isinstance(other, BiPoly) else BiPoly.const(other)
