"""Box-truncated power series in one and two variables.

Bivariate series are stored as a dense table ``coeffs[i][j]`` = [x^i y^j] for
``i <= Rx`` and ``j <= Sy``.  Every transcendental operation runs the
first-order differential recurrence along x, treating each x-slice as a
truncated series in y.  Slices are multiplied sparsely, so series of sparse
polynomials (the usual inputs) cost little more than the size of the box.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .backend import BigFloat, ExactRational
from .errors import (BackendUnsupported, DivisionResidue, NonPositiveConstantTerm,
                     OrderMismatch, OutOfBox)
from .poly import BiPoly

Backend = ExactRational | BigFloat


# ---------------------------------------------------------------------------
# univariate kernels on plain lists (length n+1), used directly for 1-D series
# and for the y-slices of 2-D series

def _sparse(row):
    return [(j, a) for j, a in enumerate(row) if a]


def _mul1(a, b, zero):
    n = len(a)
    out = [zero] * n
    sb = _sparse(b)
    for i, ai in enumerate(a):
        if not ai:
            continue
        lim = n - i
        for j, bj in sb:
            if j >= lim:
                break
            out[i + j] += ai * bj
    return out


def _addmul_into(acc, a_sp, b_sp, scale):
    """acc += scale * a * b (truncated), a and b given sparse."""
    n = len(acc)
    for i, ai in a_sp:
        c = ai * scale
        lim = n - i
        for j, bj in b_sp:
            if j >= lim:
                break
            acc[i + j] += c * bj


def _inv1(a, be):
    a0 = a[0]
    if not a0:
        raise NonPositiveConstantTerm("series with zero constant term has no inverse")
    inv0 = be.one / a0
    n = len(a)
    out = [be.zero] * n
    out[0] = inv0
    sa = [(i, ai) for i, ai in _sparse(a) if i]
    for k in range(1, n):
        s = be.zero
        for i, ai in sa:
            if i > k:
                break
            s += ai * out[k - i]
        out[k] = -s * inv0
    return out


def _log1(a, be):
    a0 = a[0]
    n = len(a)
    out = [be.zero] * n
    out[0] = be.log(a0)
    inv0 = be.one / a0
    sa = [(i, ai) for i, ai in _sparse(a) if i]
    for k in range(1, n):
        s = k * a[k]
        for i, ai in sa:
            if i >= k:
                break
            s -= ai * (k - i) * out[k - i]
        out[k] = s * inv0 / k
    return out


def _exp1(a, be):
    n = len(a)
    out = [be.zero] * n
    out[0] = be.exp(a[0])
    sa = [(i, ai) for i, ai in _sparse(a) if i]
    for k in range(1, n):
        s = be.zero
        for i, ai in sa:
            if i > k:
                break
            s += i * ai * out[k - i]
        out[k] = s / k
    return out


def _pow1(a, t, be):
    a0 = a[0]
    n = len(a)
    out = [be.zero] * n
    out[0] = be.power(a0, t)
    inv0 = be.one / a0
    sa = [(i, ai) for i, ai in _sparse(a) if i]
    for k in range(1, n):
        s = be.zero
        for i, ai in sa:
            if i > k:
                break
            s += (t * i - (k - i)) * ai * out[k - i]
        out[k] = s * inv0 / k
    return out


# ---------------------------------------------------------------------------
# series types

@dataclass(frozen=True, eq=False)
class TruncSeries1D:
    coeffs: tuple
    order: int
    backend: Backend

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coefficient table does not match the order")

    @classmethod
    def from_list(cls, values: Sequence, backend: Backend, order: int | None = None):
        order = len(values) - 1 if order is None else order
        vals = [backend.coerce(v) for v in values[:order + 1]]
        vals += [backend.zero] * (order + 1 - len(vals))
        return cls(tuple(vals), order, backend)

    def __getitem__(self, n):
        return self.coeffs[n]

    def _check(self, other):
        if not isinstance(other, TruncSeries1D) or other.order != self.order \
                or other.backend != self.backend:
            raise OrderMismatch("series orders or backends differ")

    def _new(self, vals):
        return TruncSeries1D(tuple(vals), self.order, self.backend)

    def __add__(self, other):
        if not isinstance(other, TruncSeries1D):
            vals = list(self.coeffs)
            with self.backend.context():
                vals[0] = vals[0] + self.backend.coerce(other)
            return self._new(vals)
        self._check(other)
        with self.backend.context():
            return self._new(a + b for a, b in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return self._new(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        be = self.backend
        with be.context():
            if not isinstance(other, TruncSeries1D):
                c = be.coerce(other)
                return self._new(a * c for a in self.coeffs)
            self._check(other)
            return self._new(_mul1(list(self.coeffs), list(other.coeffs), be.zero))

    __rmul__ = __mul__

    def equals(self, other, tol=None) -> bool:
        self._check(other)
        if tol is None:
            return all(a == b for a, b in zip(self.coeffs, other.coeffs))
        return all(abs(a - b) <= tol * max(1, abs(b)) for a, b in zip(self.coeffs, other.coeffs))


@dataclass(frozen=True, eq=False)
class TruncSeries2D:
    coeffs: tuple            # tuple of rows, row i = y-series of [x^i]
    orders: tuple[int, int]  # (Rx, Sy)
    backend: Backend

    def __post_init__(self):
        rx, sy = self.orders
        if rx < 0 or sy < 0:
            raise ValueError("orders must be nonnegative")
        if len(self.coeffs) != rx + 1 or any(len(r) != sy + 1 for r in self.coeffs):
            raise ValueError("coefficient table does not match the orders")

    @property
    def Rx(self) -> int:
        return self.orders[0]

    @property
    def Sy(self) -> int:
        return self.orders[1]

    @classmethod
    def zeros(cls, rx: int, sy: int, backend: Backend):
        z = backend.zero
        return cls(tuple((z,) * (sy + 1) for _ in range(rx + 1)), (rx, sy), backend)

    @classmethod
    def from_table(cls, table, backend: Backend):
        rows = tuple(tuple(backend.coerce(v) for v in row) for row in table)
        return cls(rows, (len(rows) - 1, len(rows[0]) - 1), backend)

    def __getitem__(self, ij):
        i, j = ij
        return self.coeffs[i][j]

    def rows(self) -> list[list]:
        return [list(r) for r in self.coeffs]

    def _check(self, other):
        if not isinstance(other, TruncSeries2D) or other.orders != self.orders \
                or other.backend != self.backend:
            raise OrderMismatch("series orders or backends differ")

    def _new(self, rows):
        return TruncSeries2D(tuple(tuple(r) for r in rows), self.orders, self.backend)

    def __add__(self, other):
        be = self.backend
        with be.context():
            if not isinstance(other, TruncSeries2D):
                rows = self.rows()
                rows[0][0] = rows[0][0] + be.coerce(other)
                return self._new(rows)
            self._check(other)
            return self._new([a + b for a, b in zip(ra, rb)]
                             for ra, rb in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return self._new([-a for a in r] for r in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncSeries2D):
            return series_mul(self, other)
        be = self.backend
        with be.context():
            c = be.coerce(other)
            return self._new([a * c for a in r] for r in self.coeffs)

    __rmul__ = __mul__

    def truncate(self, rx: int, sy: int) -> "TruncSeries2D":
        if rx > self.Rx or sy > self.Sy:
            raise OutOfBox("cannot enlarge a truncated series")
        return TruncSeries2D(tuple(r[:sy + 1] for r in self.coeffs[:rx + 1]), (rx, sy),
                             self.backend)

    def equals(self, other, tol=None) -> bool:
        self._check(other)
        for ra, rb in zip(self.coeffs, other.coeffs):
            for a, b in zip(ra, rb):
                if tol is None:
                    if a != b:
                        return False
                elif abs(a - b) > tol * max(1, abs(b)):
                    return False
        return True


# ---------------------------------------------------------------------------
# public operations

def series_from_poly(P: BiPoly, Rx: int, Sy: int, backend: Backend) -> TruncSeries2D:
    z = backend.zero
    rows = [[z] * (Sy + 1) for _ in range(Rx + 1)]
    for (i, j), c in P.terms.items():
        if i <= Rx and j <= Sy:
            rows[i][j] = backend.coerce(c)
    return TruncSeries2D(tuple(map(tuple, rows)), (Rx, Sy), backend)


def series1d_from_poly(P: BiPoly, R: int, backend: Backend) -> TruncSeries1D:
    """Univariate series of a polynomial in x alone."""
    if P.deg_y:
        raise ValueError("polynomial depends on y")
    vals = [backend.zero] * (R + 1)
    for (i, _), c in P.terms.items():
        if i <= R:
            vals[i] = backend.coerce(c)
    return TruncSeries1D(tuple(vals), R, backend)


def series_coeff(F, r: int, s: int | None = None):
    if isinstance(F, TruncSeries1D):
        if s not in (None, 0):
            raise OutOfBox("univariate series has no y-degree")
        if not 0 <= r <= F.order:
            raise OutOfBox(f"x^{r} outside order {F.order}")
        return F.coeffs[r]
    if s is None:
        raise TypeError("bivariate series needs both indices")
    if not (0 <= r <= F.Rx and 0 <= s <= F.Sy):
        raise OutOfBox(f"x^{r} y^{s} outside box {F.orders}")
    return F.coeffs[r][s]


def series_mul(A, B):
    if isinstance(A, TruncSeries1D):
        return A * B
    A._check(B)
    be = A.backend
    rx, sy = A.orders
    z = be.zero
    with be.context():
        a_sp = [_sparse(r) for r in A.coeffs]
        b_sp = [_sparse(r) for r in B.coeffs]
        out = [[z] * (sy + 1) for _ in range(rx + 1)]
        for i, ra in enumerate(a_sp):
            if not ra:
                continue
            for k in range(rx + 1 - i):
                if b_sp[k]:
                    _addmul_into(out[i + k], ra, b_sp[k], 1)
    return A._new(out)


def coeff_of_product(A: TruncSeries2D, B: TruncSeries2D, r: int, s: int):
    """[x^r y^s] of A*B without forming the whole product."""
    A._check(B)
    be = A.backend
    total = be.zero
    with be.context():
        for i in range(r + 1):
            ra, rb = A.coeffs[i], B.coeffs[r - i]
            for j in range(s + 1):
                a = ra[j]
                if a:
                    total += a * rb[s - j]
    return total


class _SliceRing:
    """Helpers for the recurrences along x: y-slices and their inverse."""

    def __init__(self, F: TruncSeries2D):
        self.F = F
        self.be = F.backend
        self.rows = [list(r) for r in F.coeffs]
        self.sp = [_sparse(r) for r in self.rows]
        self.nz = [i for i, r in enumerate(self.sp) if r and i]
        f0 = self.rows[0]
        self._f0_scalar = all(not a for a in f0[1:])
        self._inv0 = None

    def check_f00_positive(self):
        if not self.rows[0][0] > 0:
            raise NonPositiveConstantTerm(
                f"constant term {self.rows[0][0]} must be positive")

    def apply_inv0(self, row):
        """row / F(0, y) as a truncated y-series."""
        if self._f0_scalar:
            c = self.rows[0][0]
            if c == 1:
                return row
            return [a / c for a in row]
        if self._inv0 is None:
            self._inv0 = _inv1(self.rows[0], self.be)
        return _mul1(row, self._inv0, self.be.zero)


def _series_log2(F: TruncSeries2D) -> TruncSeries2D:
    ring = _SliceRing(F)
    ring.check_f00_positive()
    be = F.backend
    rx, sy = F.orders
    z = be.zero
    with be.context():
        g = [_log1(ring.rows[0], be)]
        g_sp = [_sparse(g[0])]
        for n in range(1, rx + 1):
            acc = [n * a for a in ring.rows[n]]
            for i in ring.nz:
                if i >= n:
                    break
                m = n - i
                if g_sp[m]:
                    _addmul_into(acc, ring.sp[i], g_sp[m], -m)
            row = ring.apply_inv0(acc)
            row = [a / n for a in row] if any(row) else [z] * (sy + 1)
            g.append(row)
            g_sp.append(_sparse(row))
    return F._new(g)


def _series_exp2(F: TruncSeries2D) -> TruncSeries2D:
    ring = _SliceRing(F)
    be = F.backend
    rx, sy = F.orders
    z = be.zero
    with be.context():
        g = [_exp1(ring.rows[0], be)]
        g_sp = [_sparse(g[0])]
        for n in range(1, rx + 1):
            acc = [z] * (sy + 1)
            for i in ring.nz:
                if i > n:
                    break
                if g_sp[n - i]:
                    _addmul_into(acc, ring.sp[i], g_sp[n - i], i)
            row = [a / n for a in acc]
            g.append(row)
            g_sp.append(_sparse(row))
    return F._new(g)


def _series_pow2(F: TruncSeries2D, t) -> TruncSeries2D:
    ring = _SliceRing(F)
    ring.check_f00_positive()
    be = F.backend
    rx, sy = F.orders
    z = be.zero
    with be.context():
        t = be.coerce(t)
        g = [_pow1(ring.rows[0], t, be)]
        g_sp = [_sparse(g[0])]
        for n in range(1, rx + 1):
            acc = [z] * (sy + 1)
            for i in ring.nz:
                if i > n:
                    break
                m = n - i
                if g_sp[m]:
                    _addmul_into(acc, ring.sp[i], g_sp[m], t * i - m)
            row = ring.apply_inv0(acc)
            row = [a / n for a in row]
            g.append(row)
            g_sp.append(_sparse(row))
    return F._new(g)


def _series_inv2(F: TruncSeries2D) -> TruncSeries2D:
    ring = _SliceRing(F)
    be = F.backend
    rx, sy = F.orders
    z = be.zero
    with be.context():
        g = [_inv1(ring.rows[0], be)]
        g_sp = [_sparse(g[0])]
        for n in range(1, rx + 1):
            acc = [z] * (sy + 1)
            for i in ring.nz:
                if i > n:
                    break
                if g_sp[n - i]:
                    _addmul_into(acc, ring.sp[i], g_sp[n - i], -1)
            row = ring.apply_inv0(acc)
            g.append(row)
            g_sp.append(_sparse(row))
    return F._new(g)


def _require_exact_compatible(F, needs):
    be = F.backend
    if isinstance(be, ExactRational):
        c = F.coeffs[0] if isinstance(F, TruncSeries1D) else F.coeffs[0][0]
        if needs == "log" and c > 0 and c != 1:
            raise BackendUnsupported("exact log needs constant term 1")
        if needs == "exp" and c != 0:
            raise BackendUnsupported("exact exp needs constant term 0")


def series_log(F):
    """log F; needs F(0,0) > 0 (equal to 1 on the exact backend)."""
    c = F.coeffs[0] if isinstance(F, TruncSeries1D) else F.coeffs[0][0]
    if not c > 0:
        raise NonPositiveConstantTerm(f"constant term {c} must be positive")
    _require_exact_compatible(F, "log")
    if isinstance(F, TruncSeries1D):
        with F.backend.context():
            return F._new(_log1(list(F.coeffs), F.backend))
    return _series_log2(F)


def series_exp(F):
    _require_exact_compatible(F, "exp")
    if isinstance(F, TruncSeries1D):
        with F.backend.context():
            return F._new(_exp1(list(F.coeffs), F.backend))
    return _series_exp2(F)


def series_pow(F, t):
    """F^t for real t; F(0,0) must be positive."""
    c = F.coeffs[0] if isinstance(F, TruncSeries1D) else F.coeffs[0][0]
    if not c > 0:
        raise NonPositiveConstantTerm(f"constant term {c} must be positive")
    be = F.backend
    if isinstance(F, TruncSeries1D):
        with be.context():
            return F._new(_pow1(list(F.coeffs), be.coerce(t), be))
    return _series_pow2(F, t)


def series_sqrt(F):
    from fractions import Fraction

    return series_pow(F, Fraction(1, 2))


def series_inv(F):
    """1/F by the direct recurrence F*G = 1."""
    if isinstance(F, TruncSeries1D):
        with F.backend.context():
            return F._new(_inv1(list(F.coeffs), F.backend))
    return _series_inv2(F)


def series_int_pow(F, k: int):
    """F^k for a nonnegative integer k by repeated multiplication."""
    if k < 0:
        raise ValueError("use series_pow for negative exponents")
    out = None
    base = F
    while k:
        if k & 1:
            out = base if out is None else out * base
        k >>= 1
        if k:
            base = base * base
    if out is None:
        if isinstance(F, TruncSeries1D):
            return TruncSeries1D.from_list([1], F.backend, F.order)
        return F._new([[F.backend.one if (i, j) == (0, 0) else F.backend.zero
                        for j in range(F.Sy + 1)] for i in range(F.Rx + 1)])
    return out


def divide_by_x(F):
    """F / x for a series whose x^0 part vanishes; the box shrinks by one in x."""
    if isinstance(F, TruncSeries1D):
        if F.coeffs[0]:
            raise DivisionResidue(f"constant term {F.coeffs[0]} is not divisible by z")
        return TruncSeries1D(F.coeffs[1:], F.order - 1, F.backend)
    if any(F.coeffs[0]):
        raise DivisionResidue("x^0 slice is not identically zero")
    return TruncSeries2D(F.coeffs[1:], (F.Rx - 1, F.Sy), F.backend)


def x_derivative(F: TruncSeries2D) -> TruncSeries2D:
    """d/dx, padded with a zero top slice to keep the box."""
    be = F.backend
    with be.context():
        rows = [[i * a for a in F.coeffs[i]] for i in range(1, F.Rx + 1)]
    rows.append([be.zero] * (F.Sy + 1))
    return F._new(rows)


def y_derivative(F: TruncSeries2D) -> TruncSeries2D:
    be = F.backend
    with be.context():
        rows = [[j * r[j] for j in range(1, F.Sy + 1)] + [be.zero] for r in F.coeffs]
    return F._new(rows)
