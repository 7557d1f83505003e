from fractions import Fraction
from math import comb, factorial

import gmpy2
import pytest
from hypothesis import given, strategies as st

from logacsv.backend import BigFloat, ExactRational
from logacsv.errors import (BackendUnsupported, DivisionResidue, NonPositiveConstantTerm,
                            OrderMismatch, OutOfBox)
from logacsv.poly import BiPoly
from logacsv.series import (TruncSeries1D, TruncSeries2D, coeff_of_product, divide_by_x,
                            series1d_from_poly, series_coeff, series_exp, series_from_poly,
                            series_int_pow, series_inv, series_log, series_mul, series_pow,
                            series_sqrt, x_derivative)

EX = ExactRational()
BF = BigFloat()


def naive_product(A, B):
    """Schoolbook double convolution, kept deliberately simple."""
    Rx, Sy = A.orders
    out = [[Fraction(0)] * (Sy + 1) for _ in range(Rx + 1)]
    for i in range(Rx + 1):
        for j in range(Sy + 1):
            for a in range(i + 1):
                for b in range(j + 1):
                    out[i][j] += Fraction(A[a, b]) * Fraction(B[i - a, j - b])
    return out


def as_fractions(F):
    return [[Fraction(v) for v in row] for row in F.rows()]


small_q = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def tables(draw, rx=None, sy=None, unit=False):
    rx = draw(st.integers(0, 5)) if rx is None else rx
    sy = draw(st.integers(0, 5)) if sy is None else sy
    rows = [[draw(small_q) for _ in range(sy + 1)] for _ in range(rx + 1)]
    if unit:
        rows[0][0] = Fraction(1)
    return TruncSeries2D.from_table(rows, EX)


@st.composite
def table_triples(draw):
    rx, sy = draw(st.integers(0, 4)), draw(st.integers(0, 4))
    return tuple(draw(tables(rx, sy)) for _ in range(3))


# ---------------------------------------------------------------------------
# construction and access

def test_from_poly_places_coefficients():
    F = series_from_poly(BiPoly.parse("1 - x - y*x^2"), 3, 2, EX)
    assert F[0, 0] == 1 and F[1, 0] == -1 and F[2, 1] == -1
    assert sum(abs(v) for row in F.rows() for v in row) == 3


def test_from_poly_drops_terms_outside_box():
    F = series_from_poly(BiPoly.parse("1 + x^5 + y^5"), 2, 2, EX)
    assert F.rows() == [[1, 0, 0], [0, 0, 0], [0, 0, 0]]


def test_series_coeff_out_of_box():
    F = series_from_poly(BiPoly.parse("1 - x - y"), 4, 4, EX)
    assert series_coeff(F, 1, 0) == -1
    with pytest.raises(OutOfBox):
        series_coeff(F, 5, 0)
    with pytest.raises(OutOfBox):
        series_coeff(F, 0, -1)


def test_order_mismatch():
    A = series_from_poly(BiPoly.x(), 3, 3, EX)
    B = series_from_poly(BiPoly.x(), 3, 4, EX)
    with pytest.raises(OrderMismatch):
        A * B
    with pytest.raises(OrderMismatch):
        A + B


# ---------------------------------------------------------------------------
# multiplication

def test_mul_one_minus_x_minus_y_squared():
    F = series_from_poly(BiPoly.parse("1 - x - y"), 4, 4, EX)
    G = series_mul(F, F)
    expect = BiPoly.parse("(1 - x - y)^2")
    for i in range(5):
        for j in range(5):
            assert G[i, j] == expect.terms.get((i, j), 0)


@given(tables(), st.data())
def test_mul_matches_naive_convolution(A, data):
    B = data.draw(tables(A.Rx, A.Sy))
    assert as_fractions(series_mul(A, B)) == naive_product(A, B)


def test_mul_matches_naive_convolution_at_8_by_8():
    P = BiPoly.parse("3 - 2*x + x*y^2 - 5*y^3 + x^4*y")
    Q = BiPoly.parse("1/2 + x^2 - y + 7*x^3*y^5")
    A, B = (series_from_poly(T, 8, 8, EX) for T in (P, Q))
    assert as_fractions(A * B) == naive_product(A, B)


def test_coeff_of_product_agrees_with_full_product():
    A = series_log(series_from_poly(BiPoly.parse("1 - x - y"), 6, 6, EX))
    B = series_inv(series_from_poly(BiPoly.parse("1 - 2*x*y - y"), 6, 6, EX))
    full = A * B
    for r in range(7):
        for s in range(7):
            assert coeff_of_product(A, B, r, s) == full[r, s]


@given(table_triples())
def test_ring_axioms(abc):
    a, b, c = abc
    assert (a * b).equals(b * a)
    assert ((a * b) * c).equals(a * (b * c))
    assert (a * (b + c)).equals(a * b + a * c)
    assert ((a + b) - b).equals(a)


def test_bigfloat_mul_close_to_exact():
    P = BiPoly.parse("1 - x/3 - y/7 + x*y")
    exact = series_int_pow(series_from_poly(P, 6, 6, EX), 5)
    approx = series_int_pow(series_from_poly(P, 6, 6, BF), 5)
    with BF.context():
        for i in range(7):
            for j in range(7):
                assert abs(BF.coerce(exact[i, j]) - approx[i, j]) < BF.coerce(2) ** -240


# ---------------------------------------------------------------------------
# inverse, log, exp, pow

def test_inverse_of_one_minus_x_minus_y_is_binomial():
    G = series_inv(series_from_poly(BiPoly.parse("1 - x - y"), 8, 8, EX))
    for i in range(9):
        for j in range(9):
            assert G[i, j] == comb(i + j, i)


def test_log_of_constant_one_is_zero():
    L = series_log(series_from_poly(BiPoly.const(1), 4, 3, EX))
    assert all(v == 0 for row in L.rows() for v in row)


def test_log_of_geometric_series():
    """log(1/(1 - x - y)) has coefficients binom(i+j, i)/(i+j)."""
    G = series_inv(series_from_poly(BiPoly.parse("1 - x - y"), 6, 6, EX))
    L = series_log(G)
    assert L[1, 1] == 1 and L[2, 1] == 1
    for i in range(7):
        for j in range(7):
            if i + j:
                assert L[i, j] == Fraction(comb(i + j, i), i + j)


def test_log_one_plus_x_alternating_harmonic():
    # oracle: integrate 1/(1+x) = sum (-1)^n x^n termwise
    L = series_log(series_from_poly(BiPoly.parse("1 + x"), 10, 0, EX))
    for n in range(1, 11):
        assert L[n, 0] == Fraction((-1) ** (n + 1), n)


def test_log_rejects_nonpositive_constant():
    with pytest.raises(NonPositiveConstantTerm):
        series_log(series_from_poly(BiPoly.parse("-1 + x"), 3, 3, EX))
    with pytest.raises(NonPositiveConstantTerm):
        series_log(series_from_poly(BiPoly.parse("x + y"), 3, 3, BF))


def test_exact_log_needs_unit_constant():
    with pytest.raises(BackendUnsupported):
        series_log(series_from_poly(BiPoly.parse("2 - x"), 3, 3, EX))
    L = series_log(series_from_poly(BiPoly.parse("2 - x"), 3, 3, BF))
    with BF.context():
        assert abs(L[0, 0] - gmpy2.log(BF.coerce(2))) < 1e-70


def test_exp_of_zero_and_of_x_plus_y():
    E = series_exp(series_from_poly(BiPoly(), 3, 3, EX))
    assert E[0, 0] == 1 and sum(abs(v) for row in E.rows() for v in row) == 1
    # oracle: exp(x) exp(y) = sum x^i y^j / (i! j!)
    E = series_exp(series_from_poly(BiPoly.parse("x + y"), 6, 6, EX))
    for i in range(7):
        for j in range(7):
            assert E[i, j] == Fraction(1, factorial(i) * factorial(j))


def test_exact_exp_needs_zero_constant():
    with pytest.raises(BackendUnsupported):
        series_exp(series_from_poly(BiPoly.parse("1 + x"), 3, 3, EX))


def test_pow_zero_is_one():
    P = series_pow(series_from_poly(BiPoly.parse("1 - x - y"), 3, 3, EX), 0)
    assert P.rows() == series_from_poly(BiPoly.const(1), 3, 3, EX).rows()


def test_sqrt_one_minus_4x():
    S = series_sqrt(series1d_from_poly(BiPoly.parse("1 - 4*x"), 4, EX))
    assert list(S.coeffs) == [1, -2, -2, -4, -10]


def test_sqrt_one_minus_4x_binomial_oracle():
    # [x^n] (1 - 4x)^(1/2) = -2/n binom(2n-2, n-1)
    S = series_sqrt(series1d_from_poly(BiPoly.parse("1 - 4*x"), 30, EX))
    for n in range(1, 31):
        assert S[n] == Fraction(-2 * comb(2 * n - 2, n - 1), n)


def test_sqrt_of_narayana_kernel_squares_back():
    H = BiPoly.parse("(1 + x - x*y)^2 - 4*x")
    F = series_from_poly(H, 6, 6, EX)
    S = series_sqrt(F)
    assert (S * S).equals(F)


def test_pow_minus_one_is_inverse():
    F = series_from_poly(BiPoly.parse("1 - x/2 - y + 3*x*y^2"), 6, 5, EX)
    assert series_pow(F, -1).equals(series_inv(F))


def test_pow_integer_exponent_with_non_unit_constant():
    F = series_from_poly(BiPoly.parse("3 - x - y"), 5, 5, EX)
    assert series_pow(F, 3).equals(series_int_pow(F, 3))
    assert series_pow(F, -2).equals(series_inv(F * F))
    with pytest.raises(BackendUnsupported):
        series_pow(F, Fraction(1, 2))


@given(tables(unit=True), st.sampled_from([2, 3, -1]))
def test_pow_round_trip(F, t):
    G = series_pow(series_pow(F, t), Fraction(1, t))
    assert G.equals(F)


@given(tables(unit=True))
def test_sqrt_squared(F):
    S = series_sqrt(F)
    assert (S * S).equals(F)


@given(tables(unit=True))
def test_exp_log_round_trip(F):
    assert series_exp(series_log(F)).equals(F)


@given(tables(unit=True))
def test_log_differential_identity(F):
    """F * d/dx log F = d/dx F within the box that the truncated derivative keeps."""
    lhs = F * x_derivative(series_log(F))
    rhs = x_derivative(F)
    if F.Rx == 0:
        return
    keep = lhs.truncate(F.Rx - 1, F.Sy)
    assert keep.equals(rhs.truncate(F.Rx - 1, F.Sy))


@given(tables(unit=True))
def test_log_of_product_is_sum(F):
    G = series_from_poly(BiPoly.parse("1 - x - y"), F.Rx, F.Sy, EX)
    assert series_log(F * G).equals(series_log(F) + series_log(G))


@given(tables(unit=True), st.integers(0, 3), st.integers(0, 3))
def test_truncation_stability(F, dx, dy):
    """Enlarging the box never changes previously computed coefficients."""
    rows = F.rows()
    big = [row + [Fraction(0)] * dy for row in rows]
    big += [[Fraction(0)] * (F.Sy + 1 + dy) for _ in range(dx)]
    G = TruncSeries2D.from_table(big, EX)
    assert series_log(G).truncate(F.Rx, F.Sy).equals(series_log(F))
    assert series_sqrt(G).truncate(F.Rx, F.Sy).equals(series_sqrt(F))


def test_bigfloat_log_matches_exact():
    F = series_from_poly(BiPoly.parse("1 - x - y*x^2"), 12, 6, EX)
    Fb = series_from_poly(BiPoly.parse("1 - x - y*x^2"), 12, 6, BF)
    with BF.context():
        ref = TruncSeries2D.from_table(series_log(F).rows(), BF)
        assert series_log(Fb).equals(ref, tol=2.0 ** -240)


# ---------------------------------------------------------------------------
# univariate series and division

def test_univariate_ops():
    F = series1d_from_poly(BiPoly.parse("1 - x"), 6, EX)
    assert list(series_inv(F).coeffs) == [1] * 7
    assert list(series_log(F).coeffs) == [0] + [Fraction(-1, n) for n in range(1, 7)]
    assert series_exp(series_log(F)).equals(F)
    with pytest.raises(ValueError):
        series1d_from_poly(BiPoly.parse("1 - y"), 3, EX)


def test_divide_by_x():
    F = series_from_poly(BiPoly.parse("x + x^2*y"), 4, 3, EX)
    G = divide_by_x(F)
    assert G.orders == (3, 3) and G[0, 0] == 1 and G[1, 1] == 1
    with pytest.raises(DivisionResidue):
        divide_by_x(series_from_poly(BiPoly.parse("1 + x"), 4, 3, EX))
    with pytest.raises(DivisionResidue):
        divide_by_x(TruncSeries1D.from_list([1, 1], EX))
