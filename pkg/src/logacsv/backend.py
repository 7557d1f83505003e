"""Coefficient backends: exact rationals (gmpy2.mpq) and big floats (gmpy2.mpfr).

A backend knows how to coerce inputs, which scalar transcendental operations
it can perform exactly, and the precision context its arithmetic runs in.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import BackendUnsupported, NonPositiveConstantTerm

DEFAULT_PRECISION_BITS = 256


def _as_mpq(v):
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


@dataclass(frozen=True)
class ExactRational:
    kind = "exact"

    def coerce(self, v):
        if isinstance(v, float) or type(v).__name__ == "mpfr":
            raise BackendUnsupported(f"exact backend cannot hold the float {v!r}")
        return _as_mpq(v)

    def context(self):
        return contextlib.nullcontext()

    @property
    def zero(self):
        return mpq(0)

    @property
    def one(self):
        return mpq(1)

    def log(self, c):
        if c <= 0:
            raise NonPositiveConstantTerm(f"constant term {c} is not positive")
        if c != 1:
            raise BackendUnsupported(f"log({c}) is not rational; use a BigFloat backend")
        return mpq(0)

    def exp(self, c):
        if c != 0:
            raise BackendUnsupported(f"exp({c}) is not rational; use a BigFloat backend")
        return mpq(1)

    def power(self, c, t):
        t = _as_mpq(t)
        if c <= 0:
            raise NonPositiveConstantTerm(f"constant term {c} is not positive")
        if c == 1:
            return mpq(1)
        if t.denominator == 1:
            return c ** int(t)
        raise BackendUnsupported(f"{c}^{t} is not rational; use a BigFloat backend")

    def __str__(self):
        return "exact"


@dataclass(frozen=True)
class BigFloat:
    precision_bits: int = DEFAULT_PRECISION_BITS
    kind = "bigfloat"

    def __post_init__(self):
        if self.precision_bits <= 0:
            raise ValueError("precision_bits must be positive")

    def context(self):
        return gmpy2.context(precision=self.precision_bits)

    def coerce(self, v):
        with self.context():
            if isinstance(v, Fraction):
                return mpfr(mpq(v.numerator, v.denominator))
            return mpfr(v)

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def log(self, c):
        if c <= 0:
            raise NonPositiveConstantTerm(f"constant term {c} is not positive")
        with self.context():
            return gmpy2.log(mpfr(c))

    def exp(self, c):
        with self.context():
            return gmpy2.exp(mpfr(c))

    def power(self, c, t):
        if c <= 0:
            raise NonPositiveConstantTerm(f"constant term {c} is not positive")
        with self.context():
            return mpfr(c) ** mpfr(_as_mpq(t))

    def __str__(self):
        return f"bigfloat{self.precision_bits}"


def choose_backend(exact_ok: bool, precision_bits: int = DEFAULT_PRECISION_BITS):
    return ExactRational() if exact_ok else BigFloat(precision_bits)
