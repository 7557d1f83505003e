"""Exact coefficient oracle for sums of H^(-alpha) log^beta H, and the example families."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .backend import BigFloat, ExactRational
from .errors import BackendUnsupported, DivisionResidue
from .poly import BiPoly
from .series import (TruncSeries1D, TruncSeries2D, coeff_of_product, divide_by_x,
                     series1d_from_poly, series_from_poly, series_int_pow, series_inv,
                     series_log, series_mul, series_pow, series_sqrt)


@dataclass(frozen=True)
class GFTerm:
    """weight * H^(-alpha) * log^beta(H)."""

    weight: Fraction
    H: BiPoly
    alpha: Fraction = Fraction(0)
    beta: int = 1

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if int(self.beta) != self.beta or self.beta < 0:
            raise ValueError("beta must be a nonnegative integer")
        object.__setattr__(self, "beta", int(self.beta))
        if not self.H.constant_term() > 0:
            raise ValueError(f"H(0,0) must be positive, got {self.H.constant_term()} for {self.H}")

    def exact_ok(self) -> bool:
        """Whether the series of this term has rational coefficients."""
        h0 = self.H.constant_term()
        if h0 == 1:
            return True
        return self.beta == 0 and self.alpha.denominator == 1


@dataclass(frozen=True)
class GFSpec:
    terms: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a GF spec needs at least one term")

    def exact_ok(self) -> bool:
        return all(t.exact_ok() for t in self.terms)


def term_series(term: GFTerm, Rx: int, Sy: int, backend) -> tuple[TruncSeries2D | None, TruncSeries2D | None]:
    """(H^-alpha, log^beta H) on the box; None stands for the constant 1."""
    if isinstance(backend, ExactRational) and not term.exact_ok():
        raise BackendUnsupported(f"term with H = {term.H} needs a BigFloat backend")
    F = series_from_poly(term.H, Rx, Sy, backend)
    power = None if term.alpha == 0 else series_pow(F, -term.alpha)
    logs = None
    if term.beta:
        L = series_log(F)
        logs = series_int_pow(L, term.beta)
    return power, logs


def term_coefficient(term: GFTerm, r: int, s: int, backend):
    power, logs = term_series(term, r, s, backend)
    with backend.context():
        if power is None and logs is None:
            raw = backend.one if (r, s) == (0, 0) else backend.zero
        elif power is None:
            raw = logs[r, s]
        elif logs is None:
            raw = power[r, s]
        else:
            raw = coeff_of_product(power, logs, r, s)
        return raw * backend.coerce(term.weight)


def coefficient(spec: GFSpec, r: int, s: int, backend=None):
    """[x^r y^s] of the spec, summing the terms in order."""
    if backend is None:
        backend = ExactRational() if spec.exact_ok() else BigFloat()
    total = backend.zero
    with backend.context():
        for term in spec.terms:
            # terms whose H - H(0,0) has no monomial inside the box are constant there
            if term.H.terms.keys() - {(0, 0)} and not any(
                    i <= r and j <= s for (i, j) in term.H.terms if (i, j) != (0, 0)):
                if (r, s) != (0, 0):
                    continue
            total += term_coefficient(term, r, s, backend)
    return total


def spec_series(spec: GFSpec, Rx: int, Sy: int, backend) -> TruncSeries2D:
    """Whole coefficient table of the spec on the box."""
    total = series_from_poly(BiPoly(), Rx, Sy, backend)
    for term in spec.terms:
        power, logs = term_series(term, Rx, Sy, backend)
        if power is None and logs is None:
            piece = series_from_poly(BiPoly.const(1), Rx, Sy, backend)
        elif power is None:
            piece = logs
        elif logs is None:
            piece = power
        else:
            piece = series_mul(power, logs)
        total = total + piece * term.weight
    return total


# ---------------------------------------------------------------------------
# example families

def totient(n: int) -> int:
    if n < 1:
        raise ValueError("totient is defined for positive integers")
    result, m, d = n, n, 2
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            result -= result // d
        d += 1
    if m > 1:
        result -= result // m
    return result


def necklace_spec(kmax: int) -> GFSpec:
    """sum_{k<=kmax} phi(k)/k [log(1 - x^k) - log(1 - x^k - y^k x^(2k))].

    Term 2(k-1) is the log(1 - x^k) part and term 2(k-1)+1 the other one.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    terms = []
    for k in range(1, kmax + 1):
        w = Fraction(totient(k), k)
        terms.append(GFTerm(w, BiPoly({(0, 0): 1, (k, 0): -1}), 0, 1))
        terms.append(GFTerm(-w, BiPoly({(0, 0): 1, (k, 0): -1, (2 * k, k): -1}), 0, 1))
    return GFSpec(terms, f"necklace(kmax={kmax})")


def interlaced_spec() -> GFSpec:
    """log(1/(1 - x - y)) = -log(1 - x - y)."""
    return GFSpec([GFTerm(-1, BiPoly.parse("1 - x - y"), 0, 1)], "interlaced")


NARAYANA_H = BiPoly.parse("(1 + x - x*y)^2 - 4*x")


def narayana_series(Rx: int, Sy: int, backend) -> TruncSeries2D:
    """N(z, t) = (1 + z - t z - sqrt((1 + z - t z)^2 - 4 z)) / (2 z), z -> x, t -> y."""
    A = series_from_poly(BiPoly.parse("1 + x - x*y"), Rx + 1, Sy, backend)
    S = series_sqrt(series_from_poly(NARAYANA_H, Rx + 1, Sy, backend))
    N = divide_by_x(A - S) * Fraction(1, 2)
    # N = 1/(1 - P) with P = t z + z (N - 1)
    one = series_from_poly(BiPoly.const(1), Rx, Sy, backend)
    tz = series_from_poly(BiPoly({(1, 1): 1}), Rx, Sy, backend)
    z = series_from_poly(BiPoly.x(), Rx, Sy, backend)
    P = tz + z * (N - one)
    tol = None if isinstance(backend, ExactRational) else _float_tol(backend)
    if not (N * (one - P)).equals(one, tol):
        raise DivisionResidue("N(1 - P) != 1: the Narayana series is inconsistent")
    return N


def narayana_log_spec(rpower: int, Rx: int, Sy: int, backend) -> TruncSeries2D:
    """log^rpower N(z, t) on the box (Rx, Sy)."""
    if rpower < 1:
        raise ValueError("rpower must be positive")
    return series_int_pow(series_log(narayana_series(Rx, Sy, backend)), rpower)


def catalan_series(R: int, backend) -> TruncSeries1D:
    """(1 - sqrt(1 - 4z)) / (2z)."""
    S = series_sqrt(series1d_from_poly(BiPoly.parse("1 - 4*x"), R + 1, backend))
    return divide_by_x(1 - S) * Fraction(1, 2)


def catalan_log_spec(m: int, R: int, backend=None) -> TruncSeries1D:
    """D^(m)(z) = log^m((1 - sqrt(1 - 4z)) / (2z)) to order R."""
    if m < 1:
        raise ValueError("m must be positive")
    backend = BigFloat() if backend is None else backend
    return series_int_pow(series_log(catalan_series(R, backend)), m)


def _float_tol(backend: BigFloat):
    return 2.0 ** (-backend.precision_bits + 16)


def narayana_number(n: int, k: int) -> int:
    from math import comb

    if n < 1 or not 1 <= k <= n:
        return 0
    return comb(n, k) * comb(n, k - 1) // n


def brute_force_necklaces(r: int, s: int) -> int:
    """Binary necklaces of length r with s >= 1 white beads, no two white beads
    adjacent (cyclically), counted up to rotation."""
    from itertools import combinations

    if s < 1 or r < 1:
        return 0
    seen = set()
    for whites in combinations(range(r), s):
        w = set(whites)
        if any((i + 1) % r in w for i in w):
            continue
        word = tuple(1 if i in w else 0 for i in range(r))
        seen.add(min(word[i:] + word[:i] for i in range(r)))
    return len(seen)
