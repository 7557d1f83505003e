"""Critical-point systems, smoothness certification and minimality checks.

Critical points of V = {H = 0} for the direction (r1, r2) solve

    H = 0,   r2 * x * H_x = r1 * y * H_y.

Positive solutions are found by eliminating each variable with a resultant,
isolating the positive real roots of both eliminants with exact rational
intervals, and keeping the (x, y) boxes on which both equations can vanish
under interval evaluation.
"""
from __future__ import annotations

import contextlib
import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
import sympy
from mpmath import iv

from .errors import DegenerateSystem, Inconclusive, NoPositiveSolution
from .poly import BiPoly, _X, _Y

DEFAULT_WIDTH_BITS = 64
REFINEMENT_CAP_BITS = 512


@contextlib.contextmanager
def iv_precision(bits: int):
    old = iv.prec
    iv.prec = max(old, bits)
    try:
        yield
    finally:
        iv.prec = old


@dataclass(frozen=True)
class Direction:
    r1: int
    r2: int

    def __post_init__(self):
        r1, r2 = int(self.r1), int(self.r2)
        if r1 <= 0 or r2 <= 0:
            raise ValueError("direction entries must be positive integers")
        g = math.gcd(r1, r2)
        object.__setattr__(self, "r1", r1 // g)
        object.__setattr__(self, "r2", r2 // g)

    @property
    def lam(self) -> Fraction:
        return Fraction(self.r1, self.r2)

    @classmethod
    def parse(cls, text: str) -> "Direction":
        a, sep, b = str(text).replace(":", "/").replace(",", "/").partition("/")
        if not sep:
            raise ValueError(f"direction must look like R1/R2, got {text!r}")
        return cls(int(a), int(b))

    def on_ray(self, r: int) -> int:
        """The s paired with r by the rounding rule s = round(r * r2 / r1)."""
        return round(Fraction(r * self.r2, self.r1))

    def __str__(self):
        return f"{self.r1}/{self.r2}"


@dataclass(frozen=True)
class PartialSet:
    H: BiPoly
    Hx: BiPoly
    Hy: BiPoly
    Hxx: BiPoly
    Hxy: BiPoly
    Hyy: BiPoly


class MinimalStatus(str, enum.Enum):
    VERIFIED = "Verified"
    ASSUMED = "Assumed"
    FAILED = "Failed"


TORUS_CAVEAT = ("minimality checked on the positive quadrant only; "
                "other points of the torus |x|=p, |y|=q were not examined")


@dataclass(frozen=True)
class CriticalPointRecord:
    """A positive critical point, enclosed by rational intervals."""

    p_lo: Fraction
    p_hi: Fraction
    q_lo: Fraction
    q_hi: Fraction
    smooth: bool | None = None
    minimal_status: MinimalStatus | None = None
    source_term: int | None = None
    caveats: tuple[str, ...] = ()
    _xpoly: object = field(default=None, compare=False, repr=False)
    _ypoly: object = field(default=None, compare=False, repr=False)

    @classmethod
    def exact(cls, p, q, **kw) -> "CriticalPointRecord":
        """Record for a point supplied by the caller (no eliminants)."""
        p, q = Fraction(p), Fraction(q)
        return cls(p, p, q, q, **kw)

    @property
    def p(self) -> Fraction:
        return (self.p_lo + self.p_hi) / 2

    @property
    def q(self) -> Fraction:
        return (self.q_lo + self.q_hi) / 2

    @property
    def width(self) -> Fraction:
        return max(self.p_hi - self.p_lo, self.q_hi - self.q_lo)

    @property
    def is_exact(self) -> bool:
        return self.p_lo == self.p_hi and self.q_lo == self.q_hi

    def mp_point(self, prec: int = 128):
        with mpmath.workprec(prec):
            return (mpmath.mpf(self.p.numerator) / self.p.denominator,
                    mpmath.mpf(self.q.numerator) / self.q.denominator)

    def iv_box(self):
        return _iv_between(self.p_lo, self.p_hi), _iv_between(self.q_lo, self.q_hi)

    def refined(self, bits: int) -> "CriticalPointRecord":
        eps = sympy.Rational(1, 2**bits)
        p_lo, p_hi = _refine(self._xpoly, self.p_lo, self.p_hi, eps)
        q_lo, q_hi = _refine(self._ypoly, self.q_lo, self.q_hi, eps)
        return replace(self, p_lo=p_lo, p_hi=p_hi, q_lo=q_lo, q_hi=q_hi)

    def describe(self, digits: int = 20) -> str:
        p, q = self.mp_point()
        return f"({mpmath.nstr(p, digits)}, {mpmath.nstr(q, digits)})"


def _refine(poly, lo, hi, eps):
    if poly is None or lo == hi:
        return lo, hi
    a, b = poly.refine_root(sympy.Rational(lo.numerator, lo.denominator),
                            sympy.Rational(hi.numerator, hi.denominator), eps=eps)
    return _frac(a), _frac(b)


def _frac(r) -> Fraction:
    r = sympy.Rational(r)
    return Fraction(int(r.p), int(r.q))


def _iv_of(c: Fraction):
    return iv.mpf(c.numerator) / c.denominator


def _iv_between(lo: Fraction, hi: Fraction):
    return iv.mpf([_iv_of(lo).a, _iv_of(hi).b])


# ---------------------------------------------------------------------------

def partials(H: BiPoly) -> PartialSet:
    Hx, Hy = H.diff_x(), H.diff_y()
    return PartialSet(H, Hx, Hy, Hx.diff_x(), Hx.diff_y(), Hy.diff_y())


def critical_system(H: BiPoly, direction: Direction) -> tuple[BiPoly, BiPoly]:
    x, y = BiPoly.x(), BiPoly.y()
    G = direction.r2 * x * H.diff_x() - direction.r1 * y * H.diff_y()
    return H, G


def _positive_roots(expr, var, width_bits):
    poly = sympy.Poly(expr, var)
    if poly.is_zero:
        raise DegenerateSystem("eliminant vanishes identically (positive-dimensional solution set)")
    if poly.degree() <= 0:
        return poly, []
    eps = sympy.Rational(1, 2**width_bits)
    roots = []
    for (a, b), _mult in poly.intervals(eps=eps, inf=0):
        a, b = _frac(a), _frac(b)
        if b <= 0:
            continue
        roots.append((a, b))
    return poly, roots


def _pair_roots(polys, xs, ys, prec):
    """Boxes xs[i] x ys[j] on which every polynomial in ``polys`` may vanish."""
    found = []
    with iv_precision(prec):
        for xlo, xhi in xs:
            X = _iv_between(xlo, xhi)
            for ylo, yhi in ys:
                Y = _iv_between(ylo, yhi)
                if all(0 in P.evaluate(X, Y, iv) for P in polys):
                    found.append((xlo, xhi, ylo, yhi))
    return found


def solve_critical(H: BiPoly, direction: Direction,
                   width_bits: int = DEFAULT_WIDTH_BITS) -> list[CriticalPointRecord]:
    """All critical points with p > 0 and q > 0, each coordinate isolated to
    width 2**-width_bits."""
    if H.is_zero():
        raise DegenerateSystem("H is identically zero")
    H_, G = critical_system(H, direction)
    if G.is_zero():
        raise DegenerateSystem("critical equation vanishes identically")
    hs, gs = H_.to_sympy().as_expr(), G.to_sympy().as_expr()
    xpoly, xs = _positive_roots(sympy.resultant(hs, gs, _Y), _X, width_bits)
    ypoly, ys = _positive_roots(sympy.resultant(hs, gs, _X), _Y, width_bits)
    boxes = _pair_roots((H_, G), xs, ys, 2 * width_bits + 64)
    if not boxes:
        raise NoPositiveSolution(f"no positive critical point of {H} for direction {direction}")
    return [CriticalPointRecord(*b, _xpoly=xpoly, _ypoly=ypoly) for b in boxes]


def singular_real_points(H: BiPoly, width_bits: int = DEFAULT_WIDTH_BITS):
    """Real solutions of H = H_x = H_y = 0 as rational boxes (x_lo, x_hi, y_lo, y_hi)."""
    ps = partials(H)
    exprs = [P.to_sympy().as_expr() for P in (ps.H, ps.Hx, ps.Hy)]
    exprs = [e for e in exprs if e != 0]
    gb = sympy.groebner(exprs, _X, _Y, order="lex")
    if list(gb.exprs) == [1]:
        return []
    gb_y = sympy.groebner(exprs, _Y, _X, order="lex")
    elim_y = [g for g in gb.exprs if not g.has(_X)]
    elim_x = [g for g in gb_y.exprs if not g.has(_Y)]
    if not elim_x or not elim_y:
        raise DegenerateSystem("nonsmooth locus is positive-dimensional")
    eps = sympy.Rational(1, 2**width_bits)

    def real_roots(expr, var):
        return [(_frac(a), _frac(b)) for (a, b), _ in sympy.Poly(expr, var).intervals(eps=eps)]

    xs, ys = real_roots(elim_x[0], _X), real_roots(elim_y[0], _Y)
    return _pair_roots((ps.H, ps.Hx, ps.Hy), xs, ys, 2 * width_bits + 64)


def _overlaps(box, rec):
    xlo, xhi, ylo, yhi = box
    return xlo <= rec.p_hi and rec.p_lo <= xhi and ylo <= rec.q_hi and rec.q_lo <= yhi


def check_smooth(H: BiPoly, rec: CriticalPointRecord,
                 cap_bits: int = REFINEMENT_CAP_BITS) -> bool:
    """True iff (H_x, H_y) is certified nonzero at the point."""
    ps = partials(H)
    if rec.is_exact:
        return not (ps.Hx(rec.p, rec.q) == 0 and ps.Hy(rec.p, rec.q) == 0)
    bits = max(DEFAULT_WIDTH_BITS, math.ceil(-math.log2(float(rec.width))) if rec.width else 0)
    while True:
        with iv_precision(2 * bits + 64):
            X, Y = rec.iv_box()
            if 0 not in ps.Hx.evaluate(X, Y, iv) or 0 not in ps.Hy.evaluate(X, Y, iv):
                return True
        if bits >= cap_bits:
            break
        bits = min(2 * bits, cap_bits)
        rec = rec.refined(bits)
    if any(_overlaps(b, rec) for b in singular_real_points(H)):
        return False
    raise Inconclusive(f"cannot separate the gradient from zero at {rec.describe()}")


def check_minimal(H: BiPoly, rec: CriticalPointRecord, grid_n: int = 64,
                  max_depth: int = 6, prec: int = 96) -> MinimalStatus:
    """Search the positive box below (p, q) for zeros of H.

    H(v p, w q) is bounded over a grid_n x grid_n grid of cells covering
    (v, w) in [0, 1]^2 with interval arithmetic; undecided cells are bisected
    up to ``max_depth`` times.  The cell touching (1, 1), where H vanishes,
    is certified instead by showing both partial derivatives keep the sign
    opposite to H(0, 0) there, so H cannot return to zero inside it.
    """
    ps = partials(H)
    h0 = H.constant_term()
    if h0 == 0:
        return MinimalStatus.ASSUMED
    sign0 = 1 if h0 > 0 else -1
    with iv_precision(prec):
        P, Q = rec.iv_box()
        # H(v p, w q) as a polynomial in (v, w) with interval coefficients
        scaled = [(_iv_of(c) * P**i * Q**j, i, j) for (i, j), c in H.terms.items()]
        dv = [(_iv_of(c) * i * P**i * Q**j, i - 1, j) for (i, j), c in H.terms.items() if i]
        dw = [(_iv_of(c) * j * P**i * Q**j, i, j - 1) for (i, j), c in H.terms.items() if j]

        def ev(poly, V, W):
            total = iv.mpf(0)
            for c, i, j in poly:
                total += c * V**i * W**j
            return total

        def sign_of(I):
            if I.a > 0:
                return 1
            if I.b < 0:
                return -1
            return 0

        def cell(v0, v1, w0, w1, depth):
            V, W = _iv_between(v0, v1), _iv_between(w0, w1)
            corner = v1 == 1 and w1 == 1
            if corner:
                if sign_of(ev(dv, V, W)) == -sign0 and sign_of(ev(dw, V, W)) == -sign0:
                    return MinimalStatus.VERIFIED
            else:
                s = sign_of(ev(scaled, V, W))
                if s == sign0:
                    return MinimalStatus.VERIFIED
                if s == -sign0:
                    return MinimalStatus.FAILED
                vm, wm = (v0 + v1) / 2, (w0 + w1) / 2
                if sign_of(ev(scaled, _iv_of(vm), _iv_of(wm))) == -sign0:
                    return MinimalStatus.FAILED
            if depth >= max_depth:
                return MinimalStatus.ASSUMED
            vm, wm = (v0 + v1) / 2, (w0 + w1) / 2
            worst = MinimalStatus.VERIFIED
            for sub in ((v0, vm, w0, wm), (vm, v1, w0, wm), (v0, vm, wm, w1), (vm, v1, wm, w1)):
                st = cell(*sub, depth + 1)
                if st is MinimalStatus.FAILED:
                    return st
                if st is MinimalStatus.ASSUMED:
                    worst = st
            return worst

        status = MinimalStatus.VERIFIED
        for a in range(grid_n):
            for b in range(grid_n):
                st = cell(Fraction(a, grid_n), Fraction(a + 1, grid_n),
                          Fraction(b, grid_n), Fraction(b + 1, grid_n), 0)
                if st is MinimalStatus.FAILED:
                    return st
                if st is MinimalStatus.ASSUMED:
                    status = st
    return status


def certify(H: BiPoly, rec: CriticalPointRecord, grid_n: int = 64) -> CriticalPointRecord:
    """Run the smoothness and minimality checks and return an updated record."""
    smooth = check_smooth(H, rec)
    status = check_minimal(H, rec, grid_n) if smooth else None
    caveats = rec.caveats + ((TORUS_CAVEAT,) if status is MinimalStatus.VERIFIED else ())
    return replace(rec, smooth=smooth, minimal_status=status, caveats=caveats)
