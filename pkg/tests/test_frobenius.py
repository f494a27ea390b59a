from __future__ import annotations

from fractions import Fraction

import mpmath as mp
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from heun_spectra.frobenius import (
    series_coefficients,
    solve_truncation,
    truncation_polynomial,
    verify_polynomial_solution,
)

fractions = st.fractions(min_value=-4, max_value=4, max_denominator=20)
gammas = st.fractions(min_value=0, max_value=4, max_denominator=6)


def test_first_coefficients():
    a = series_coefficients(Fraction(1), Fraction(2), Fraction(5), 3)
    alpha, g = 3, 5 - 4
    assert a[0] == 1
    assert a[1] == Fraction(2, alpha)
    # a_2 = [b a_1 - g a_0] / (2 (alpha + 1))
    assert a[2] == (2 * a[1] - g) / (2 * (alpha + 1))


def test_oscillator_series_terminates():
    # b = 0, W = 2 gamma + 2 + 2n with n even gives a polynomial of degree n
    a = series_coefficients(Fraction(1), Fraction(0), Fraction(8), 8)
    assert a[3:] == [0] * 6
    assert a[2] != 0


@given(gammas, fractions, fractions)
def test_parity_in_b(gamma, b, W):
    plus = series_coefficients(gamma, b, W, 12)
    minus = series_coefficients(gamma, -b, W, 12)
    assert all(m == (-1) ** j * p for j, (p, m) in enumerate(zip(plus, minus)))


def test_truncation_polynomials():
    x = sp.Symbol("x")

    def monic(n):
        poly = truncation_polynomial(n, 1).monic()
        return sp.Poly([sp.Rational(c.numerator, c.denominator)
                        for c in reversed(poly.coefficients)], x)

    assert monic(0) == sp.Poly(x, x)
    assert monic(1) == sp.Poly(x**2 - 6, x)
    assert monic(2) == sp.Poly(x**3 - 28 * x, x)
    assert monic(3) == sp.Poly(x**4 - 80 * x**2 + 540, x)


@given(st.integers(0, 6), gammas)
def test_truncation_roots_real_simple_and_symmetric(n, gamma):
    sols = solve_truncation(n, gamma, digits=30)
    assert len(sols) == n + 1
    roots = [s.b_root for s in sols]
    assert roots == sorted(roots)
    assert all(abs(r + s) < mp.mpf("1e-25") for r, s in zip(roots, reversed(roots)))
    assert len({mp.nstr(r, 20) for r in roots}) == n + 1


def test_n1_gamma1_exact():
    sols = solve_truncation(1, 1)
    assert [sp.simplify(s.b_exact - e) for s, e in zip(sols, (-sp.sqrt(6), sp.sqrt(6)))] == [0, 0]
    assert all(s.W == 6 for s in sols)
    assert all(verify_polynomial_solution(s) < mp.mpf("1e-40") for s in sols)


def test_n0_oscillator():
    (sol,) = solve_truncation(0, 1)
    assert sol.b_root == 0 and sol.W == 4 and sol.coefficients == (1,)


def test_n2_gamma1():
    sols = solve_truncation(2, 1)
    assert [s.b_exact for s in sols] == [-2 * sp.sqrt(7), 0, 2 * sp.sqrt(7)]
    assert all(s.W == 8 for s in sols)


def test_float_gamma_path_matches_exact():
    exact = solve_truncation(3, Fraction(1, 2), digits=40)
    approx = solve_truncation(3, mp.mpf("0.5"), digits=40)
    assert all(abs(a.b_root - e.b_root) < mp.mpf("1e-38") for a, e in zip(approx, exact))
    assert all(verify_polynomial_solution(s) < mp.mpf("1e-40") for s in approx)


def test_wrong_b_is_not_a_solution():
    sol = solve_truncation(1, 1)[1]
    bad = type(sol)(sol.n, sol.gamma, sol.b_root + mp.mpf("1e-3"), sol.W, sol.coefficients)
    assert verify_polynomial_solution(bad) > mp.mpf("1e-4")


def test_bad_arguments():
    with pytest.raises(ValueError):
        truncation_polynomial(-1, 1)
    with pytest.raises(ValueError):
        series_coefficients(1, 0, 4, -1)
    with pytest.raises(ValueError):
        verify_polynomial_solution(solve_truncation(0, 1)[0], digits=10)
