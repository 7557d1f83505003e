"""Coefficient asymptotics of H^(-alpha) log^beta H at a smooth minimal point.

For a smooth strictly minimal critical point (p, q) in the direction
lambda = r1/r2 the estimate is

    (-1)^beta (-p H_x)^(-alpha) r^(alpha-1)
    --------------------------------------- p^-r q^-s log^beta r [1 + sum_j E_j / log^j r]
         Gamma(alpha) sqrt(-2 pi q^2 M r)

with chi1 = H_y/H_x, chi2 = (chi1^2 H_xx - 2 chi1 H_xy + H_yy) / (2 H_x) and
M = -2 chi2/p - chi1^2/p^2 - 1/(lambda q^2), all evaluated at (p, q).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mp, mpf

from .errors import (ChiMismatch, DirectionMismatch, HxVanishes, MVanishes,
                     NegativeLogArgument, PositiveM, TiedGrowth, UnsupportedAlpha)
from .poly import BiPoly
from .polysys import CriticalPointRecord, Direction, partials

WORK_PREC = 128
CHI_TOL = mpf("1e-10")
TIE_TOL = 1e-12
CROSSCHECK_TOL = mpf("1e-12")


def _mp(v):
    if isinstance(v, Fraction):
        return mpf(v.numerator) / v.denominator
    return mpf(v)


def _is_nonpositive_integer(alpha) -> bool:
    a = Fraction(alpha) if not isinstance(alpha, mpf) else None
    if a is not None:
        return a.denominator == 1 and a <= 0
    return alpha <= 0 and alpha == mpmath.floor(alpha)


# ---------------------------------------------------------------------------
# local geometry

@dataclass(frozen=True)
class LocalGeometry:
    p: mpf
    q: mpf
    lam: Fraction
    hx: mpf
    hy: mpf
    hxx: mpf
    hxy: mpf
    hyy: mpf
    chi1: mpf
    chi2: mpf
    M: mpf


def local_geometry(H: BiPoly, rec: CriticalPointRecord, direction: Direction,
                   prec: int = WORK_PREC, chi_tol=CHI_TOL) -> LocalGeometry:
    ps = partials(H)
    lam = direction.lam
    with mpmath.workprec(prec):
        p, q = rec.mp_point(prec)
        hx, hy, hxx, hxy, hyy = (P.evaluate(p, q, mp) for P in
                                 (ps.Hx, ps.Hy, ps.Hxx, ps.Hxy, ps.Hyy))
        if hx == 0:
            raise HxVanishes(f"H_x vanishes at {rec.describe()}")
        chi1 = hy / hx
        chi1_dir = p / (_mp(lam) * q)
        if abs(chi1 - chi1_dir) > chi_tol * max(abs(chi1), abs(chi1_dir)):
            raise ChiMismatch(
                f"H_y/H_x = {mpmath.nstr(chi1, 15)} but p/(lambda q) = "
                f"{mpmath.nstr(chi1_dir, 15)}; the point is not critical for {direction}")
        chi2 = (chi1**2 * hxx - 2 * chi1 * hxy + hyy) / (2 * hx)
        M = -2 * chi2 / p - chi1**2 / p**2 - 1 / (_mp(lam) * q**2)
        if M == 0:
            raise MVanishes(f"M vanishes at {rec.describe()}")
    return LocalGeometry(p, q, lam, hx, hy, hxx, hxy, hyy, chi1, chi2, M)


# ---------------------------------------------------------------------------
# 1/Gamma and the correction terms

def gamma_recip_derivs(alpha, jmax: int, prec: int = WORK_PREC) -> list[mpf]:
    """[d^j/dt^j 1/Gamma(t)] at t = alpha for j = 0..jmax.

    Uses (1/Gamma)' = -psi * (1/Gamma) differentiated by Leibniz' rule.  At
    t = -m (m >= 0) 1/Gamma(t) = t (t+1) ... (t+m) / Gamma(t+m+1) gives the
    limiting values.
    """
    if jmax < 0:
        raise ValueError("jmax must be nonnegative")
    with mpmath.workprec(prec + 32):
        a = _mp(alpha)
        if _is_nonpositive_integer(alpha):
            m = int(-a)
            shifted = gamma_recip_derivs(a + m + 1, jmax, prec + 32)
            # coefficients of P(t) = prod_{i=0..m} (t + i) expanded around t = a
            poly = [mpf(1)]
            for i in range(m + 1):
                c = a + i               # factor (t - a) + c
                nxt = [mpf(0)] * (len(poly) + 1)
                for k, v in enumerate(poly):
                    nxt[k] += v * c
                    nxt[k + 1] += v
                poly = nxt
            pder = [poly[i] * mpmath.factorial(i) if i < len(poly) else mpf(0)
                    for i in range(jmax + 1)]
            out = [mpmath.fsum(mpmath.binomial(j, i) * pder[i] * shifted[j - i]
                               for i in range(j + 1)) for j in range(jmax + 1)]
        else:
            psi = [mpmath.psi(k, a) for k in range(jmax)]
            out = [mpmath.rgamma(a)]
            for n in range(jmax):
                out.append(-mpmath.fsum(mpmath.binomial(n, k) * psi[k] * out[n - k]
                                        for k in range(n + 1)))
    with mpmath.workprec(prec):
        return [+v for v in out]


def _log_argument(p, hx):
    arg = -1 / (_mp(p) * _mp(hx))
    if not arg > 0:
        raise NegativeLogArgument(f"-p*H_x = {mpmath.nstr(-_mp(p) * _mp(hx), 15)} is not positive")
    return mpmath.log(arg)


def scaled_log_terms(alpha, beta: int, L, prec: int = WORK_PREC) -> list[mpf]:
    """T_j = sum_k C(beta,j) C(j,k) L^k (1/Gamma)^(j-k)(alpha), j = 0..beta.

    These are Gamma(alpha)^-1 times the correction terms; unlike them they
    stay finite at alpha = 0.
    """
    d = gamma_recip_derivs(alpha, beta, prec)
    with mpmath.workprec(prec):
        return [mpmath.binomial(beta, j) * mpmath.fsum(
                    mpmath.binomial(j, k) * L**k * d[j - k] for k in range(j + 1))
                for j in range(beta + 1)]


def correction_terms_closed_form(alpha, beta: int, p, hx, prec: int = WORK_PREC) -> list[mpf]:
    with mpmath.workprec(prec):
        L = _log_argument(p, hx)
        d = gamma_recip_derivs(alpha, beta, prec)
        g = 1 / d[0]
        return [mpmath.fsum(mpmath.binomial(beta, j) * mpmath.binomial(j, k) * L**k * g * d[j - k]
                            for k in range(j + 1)) for j in range(1, beta + 1)]


def correction_terms_assembled(alpha, beta: int, p, hx, prec: int = WORK_PREC) -> list[mpf]:
    """Same terms regrouped as E_j = sum_k e^(k)_(j-k) with
    e^(k)_i = C(beta,k) L^k c^(k)_i and c^(k)_i = C(beta-k,i) Gamma(alpha) (1/Gamma)^(i)(alpha)."""
    with mpmath.workprec(prec):
        L = _log_argument(p, hx)
        d = gamma_recip_derivs(alpha, beta, prec)
        g = 1 / d[0]

        def c(k, i):
            return mpmath.binomial(beta - k, i) * g * d[i]

        return [mpmath.fsum(mpmath.binomial(beta, k) * L**k * c(k, j - k) for k in range(j + 1))
                for j in range(1, beta + 1)]


def correction_terms(alpha, beta: int, p, hx, prec: int = WORK_PREC) -> list[mpf]:
    """E_1..E_beta; both groupings are computed and must agree."""
    if _is_nonpositive_integer(alpha):
        raise UnsupportedAlpha("E_j involves Gamma(alpha), which has a pole here")
    closed = correction_terms_closed_form(alpha, beta, p, hx, prec)
    assembled = correction_terms_assembled(alpha, beta, p, hx, prec)
    for j, (a, b) in enumerate(zip(closed, assembled), 1):
        if abs(a - b) > CROSSCHECK_TOL * max(1, abs(a)):
            raise ArithmeticError(f"E_{j}: closed form {a} != regrouped sum {b}")
    return closed


# ---------------------------------------------------------------------------
# expansions

@dataclass(frozen=True)
class Estimate:
    """A real number carried as sign * mantissa * 10^exponent."""

    mantissa: float
    exponent: int
    value: mpf = field(compare=False, repr=False)

    @classmethod
    def from_log(cls, sign: int, log_abs) -> "Estimate":
        if sign == 0:
            return cls(0.0, 0, mpf(0))
        with mpmath.workprec(WORK_PREC):
            l10 = log_abs / mpmath.log(10)
            e = int(mpmath.floor(l10))
            mant = mpmath.power(10, l10 - e)
            if mant >= 10:        # rounding at the boundary
                mant, e = mant / 10, e + 1
            value = sign * mpmath.exp(log_abs)
        return cls(float(sign * mant), e, value)

    @classmethod
    def from_value(cls, v) -> "Estimate":
        with mpmath.workprec(WORK_PREC):
            v = _mp(v) if not isinstance(v, mpf) else v
            if v == 0:
                return cls(0.0, 0, mpf(0))
            return cls.from_log(1 if v > 0 else -1, mpmath.log(abs(v)))

    def to_float(self) -> float:
        try:
            return float(self.value)
        except OverflowError:  # pragma: no cover - mpf -> float saturates instead
            return math.copysign(math.inf, self.mantissa)

    def __str__(self):
        return f"{self.mantissa:.6f}e{self.exponent:+d}"


@dataclass(frozen=True)
class AsymptoticExpansion:
    """prefactor * r^r_exponent * p^-r * q^-s * log^log_power r * [1 + sum_j c_j / log^j r]"""

    alpha: Fraction
    beta: int
    p: mpf
    q: mpf
    prefactor: mpf
    corrections: tuple
    zero_alpha_branch: bool
    r_exponent: Fraction
    log_power: int
    direction: Direction | None = None

    def scaled(self, c) -> "AsymptoticExpansion":
        from dataclasses import replace

        with mpmath.workprec(WORK_PREC):
            return replace(self, prefactor=self.prefactor * _mp(c))

    def log_bracket(self, r):
        with mpmath.workprec(WORK_PREC):
            lr = mpmath.log(r)
            return 1 + mpmath.fsum(c / lr**j for j, c in enumerate(self.corrections, 1))


def leading_asymptotic(geom: LocalGeometry, alpha, beta: int,
                       direction: Direction | None = None) -> AsymptoticExpansion:
    alpha = Fraction(alpha)
    if beta < 0:
        raise ValueError("beta must be a nonnegative integer")
    if alpha.denominator == 1 and alpha < 0:
        raise UnsupportedAlpha(f"alpha = {alpha} is a negative integer")
    if alpha == 0 and beta == 0:
        raise UnsupportedAlpha("H^0 log^0 H is constant; there is nothing to estimate")
    if geom.M > 0:
        raise PositiveM(f"M = {mpmath.nstr(geom.M, 15)} > 0: sqrt(-2 pi q^2 M r) is not real")
    with mpmath.workprec(WORK_PREC):
        p, q, hx = geom.p, geom.q, geom.hx
        L = _log_argument(p, hx)
        root = mpmath.sqrt(-2 * mpmath.pi * q**2 * geom.M)
        sign = -1 if beta % 2 else 1
        if alpha == 0:
            T = scaled_log_terms(0, beta, L)
            # T_0 = 0 and T_1 = beta * (1/Gamma)'(0) = beta
            prefactor = sign * T[1] / root
            corr = tuple(T[j + 1] / T[1] for j in range(1, beta))
            return AsymptoticExpansion(alpha, beta, p, q, prefactor, corr, True,
                                       Fraction(-3, 2), beta - 1, direction)
        a = _mp(alpha)
        prefactor = sign * (-p * hx) ** (-a) * mpmath.rgamma(a) / root
        corr = tuple(correction_terms(alpha, beta, p, hx))
        return AsymptoticExpansion(alpha, beta, p, q, prefactor, corr, False,
                                   alpha - Fraction(3, 2), beta, direction)


def evaluate(expansion: AsymptoticExpansion, r: int, s: int, check_direction: bool = True) -> Estimate:
    """Value of the expansion at (r, s), computed in log space."""
    if r <= 0 or s < 0:
        raise DirectionMismatch("r must be positive and s nonnegative")
    d = expansion.direction
    if check_direction and d is not None and s != d.on_ray(r):
        raise DirectionMismatch(f"(r, s) = ({r}, {s}) is off the ray {d}: expected s = {d.on_ray(r)}")
    with mpmath.workprec(WORK_PREC):
        lr = mpmath.log(r)
        if expansion.log_power and r == 1:
            return Estimate(0.0, 0, mpf(0))
        bracket = expansion.log_bracket(r)
        pieces = expansion.prefactor * bracket
        if pieces == 0:
            return Estimate(0.0, 0, mpf(0))
        sign = 1 if pieces > 0 else -1
        log_abs = (mpmath.log(abs(pieces)) + _mp(expansion.r_exponent) * lr
                   - r * mpmath.log(expansion.p) - s * mpmath.log(expansion.q))
        if expansion.log_power:
            if lr < 0:
                sign *= (-1) ** expansion.log_power
            log_abs += expansion.log_power * mpmath.log(abs(lr))
        return Estimate.from_log(sign, log_abs)


def univariate_standard_scale(alpha, beta_power: int, r: int, jmax: int | None = None,
                              prec: int = WORK_PREC) -> mpf:
    """r^(alpha-1)/Gamma(alpha) log^b r [1 + sum_{j<=jmax} c_j / log^j r],
    c_j = C(b,j) Gamma(alpha) (1/Gamma)^(j)(alpha), the standard scale for
    [z^r] (1-z)^-alpha log^b(1/(1-z)).  At alpha in Z<=0 the limiting value
    r^(alpha-1) log^b r sum_j C(b,j) (1/Gamma)^(j)(alpha) / log^j r is used."""
    jmax = beta_power if jmax is None else jmax
    d = gamma_recip_derivs(alpha, jmax, prec)
    with mpmath.workprec(prec):
        lr = mpmath.log(r)
        series = mpmath.fsum(mpmath.binomial(beta_power, j) * d[j] / lr**j
                             for j in range(jmax + 1))
        return mpmath.power(r, _mp(alpha) - 1) * lr**beta_power * series


# ---------------------------------------------------------------------------
# dominant term selection

def growth_exponent(rec: CriticalPointRecord, direction: Direction) -> mpf:
    """Per-unit-n exponential rate -(r1 log p + r2 log q)."""
    with mpmath.workprec(WORK_PREC):
        p, q = rec.mp_point()
        return -(direction.r1 * mpmath.log(p) + direction.r2 * mpmath.log(q))


def rank_candidates(candidates: Sequence[tuple[int, CriticalPointRecord]],
                    direction: Direction) -> list[tuple[int, CriticalPointRecord]]:
    if not candidates:
        raise ValueError("no candidates")
    ranked = sorted(candidates, key=lambda c: growth_exponent(c[1], direction), reverse=True)
    if len(ranked) > 1:
        g1, g2 = growth_exponent(ranked[0][1], direction), growth_exponent(ranked[1][1], direction)
        if abs(g1 - g2) <= TIE_TOL * max(1, abs(g1)):
            raise TiedGrowth(
                f"terms {ranked[0][0]} and {ranked[1][0]} share the largest growth rate "
                f"({ranked[0][1].describe(12)} vs {ranked[1][1].describe(12)})")
    return ranked


def dominant_term(candidates: Sequence[tuple[int, CriticalPointRecord]],
                  direction: Direction) -> int:
    return rank_candidates(candidates, direction)[0][0]
