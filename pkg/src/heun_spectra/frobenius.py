"""Frobenius series, the three-term recurrence and its truncation.

With R = zeta**gamma * exp(-zeta**2/2) * sum_j a_j zeta**j the canonical
equation gives

    a_{m+2} = [b a_{m+1} + (2m - g) a_m] / ((m + 2)(m + alpha + 1)),
    a_{-1} = 0, a_0 = 1, alpha = 2 gamma + 1, g = W - 2 gamma - 2.

The series terminates at degree n when g = 2n and a_{n+1} = 0. For fixed
gamma and n the second condition is a polynomial equation in b, so exact
solutions exist only on a discrete set of b values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any, Sequence

import mpmath as mp
import sympy as sp

from .model import DimensionlessProblem


@dataclass(frozen=True)
class RecurrenceParams:
    alpha: Any
    g: Any
    b: Any

    @classmethod
    def from_problem(cls, gamma, b, W) -> RecurrenceParams:
        return cls(alpha=2 * gamma + 1, g=W - 2 * gamma - 2, b=b)


@dataclass(frozen=True)
class BPolynomial:
    """``a_{n+1}`` as a polynomial in b; ``coefficients[i]`` multiplies b**i."""

    coefficients: tuple
    exact: bool

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, b):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * b + c
        return acc

    def monic(self) -> BPolynomial:
        lead = self.coefficients[-1]
        return BPolynomial(tuple(c / lead for c in self.coefficients), self.exact)


@dataclass(frozen=True)
class TruncationSolution:
    n: int
    gamma: Any
    b_root: mp.mpf
    W: Any
    coefficients: tuple
    b_exact: Any = None  # sympy algebraic number on the exact path

    @property
    def problem(self) -> DimensionlessProblem:
        return DimensionlessProblem(_mpf(self.gamma), self.b_root)


def series_coefficients(gamma, b, W, count: int) -> list:
    """Return ``a_0 .. a_count`` of the Frobenius series.

    Works in whatever arithmetic the inputs carry (Fraction, mpf, float).
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    p = RecurrenceParams.from_problem(gamma, b, W)
    a = [1 + 0 * p.alpha]
    prev = 0
    for m in range(-1, count - 1):
        cur = a[-1]
        nxt = (p.b * cur + (2 * m - p.g) * prev) / ((m + 2) * (m + p.alpha + 1))
        a.append(nxt)
        prev = cur
    return a


def _poly_mul_b(p: list) -> list:
    return [0 * p[0]] + p


def _poly_axpy(x: list, y: list, cx, cy) -> list:
    n = max(len(x), len(y))
    x = x + [0] * (n - len(x))
    y = y + [0] * (n - len(y))
    return [cx * u + cy * v for u, v in zip(x, y)]


def _as_exact(gamma):
    if isinstance(gamma, Rational):
        return Fraction(gamma.numerator, gamma.denominator)
    if isinstance(gamma, str):
        return Fraction(gamma)
    return None


def truncation_polynomial(n: int, gamma) -> BPolynomial:
    """Coefficient ``a_{n+1}`` at ``g = 2n`` as a polynomial in b.

    Integer, Fraction and string inputs for gamma use exact rationals;
    anything else is converted to mpf.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    exact = _as_exact(gamma)
    if exact is not None:
        alpha = 2 * exact + 1
        one = Fraction(1)
    else:
        alpha = 2 * mp.mpf(gamma) + 1
        one = mp.mpf(1)
    g = 2 * n
    prev: list = [0 * one]
    cur: list = [one]
    for m in range(-1, n):
        denom = (m + 2) * (m + alpha + 1)
        nxt = _poly_axpy(_poly_mul_b(cur), prev, one / denom, (2 * m - g) / denom)
        prev, cur = cur, nxt
    while len(cur) > 1 and cur[-1] == 0:
        cur.pop()
    return BPolynomial(tuple(cur), exact is not None)


def _mpf(x) -> mp.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _polish(poly: BPolynomial, guess, digits: int):
    coeffs = [_mpf(c) for c in poly.coefficients]

    def f(x):
        return mp.polyval(coeffs[::-1], x)

    return mp.findroot(f, mp.mpf(guess), tol=mp.mpf(10) ** (-(digits - 5)))


def solve_truncation(n: int, gamma, digits: int = 50) -> list[TruncationSolution]:
    """All real Coulomb strengths b for which the series ends at degree n.

    Roots are isolated exactly (sympy) on the rational path and by
    simultaneous iteration (mpmath.polyroots) otherwise, then polished by Newton in
    ``digits + 10`` decimal digits. Results are sorted by b.
    """
    work = max(digits, 50) + 10
    out = []
    with mp.workdps(work):
        poly = truncation_polynomial(n, gamma)
        if poly.exact:
            x = sp.Symbol("b")
            spoly = sp.Poly(
                [sp.Rational(c.numerator, c.denominator) for c in reversed(poly.coefficients)],
                x,
            )
            roots = [(r, r.evalf(work)) for r in spoly.real_roots()]
            gamma_val = _as_exact(gamma)
        else:
            coeffs = [mp.mpf(c) for c in reversed(poly.coefficients)]
            found = mp.polyroots(coeffs, maxsteps=200, extraprec=4 * work) if len(coeffs) > 1 else []
            roots = [(None, mp.re(r)) for r in found if abs(mp.im(r)) < mp.mpf(10) ** (-work // 2)]
            gamma_val = mp.mpf(gamma)
        for exact_root, approx in sorted(roots, key=lambda t: t[1]):
            b = _polish(poly, mp.mpf(str(approx)), work) if poly.degree > 0 else mp.mpf(0)
            if exact_root is not None and exact_root == 0:
                b = mp.mpf(0)
            W = 2 * gamma_val + 2 * n + 2
            coeffs = series_coefficients(_mpf(gamma_val), b, _mpf(W), n)
            out.append(
                TruncationSolution(
                    n=n, gamma=gamma_val, b_root=b, W=W,
                    coefficients=tuple(coeffs), b_exact=exact_root,
                )
            )
    return out


def _residual_at(sol: TruncationSolution, zeta, coeffs: Sequence) -> mp.mpf:
    gamma = _mpf(sol.gamma)
    W = _mpf(sol.W)
    b = mp.mpf(sol.b_root)

    # R = zeta**gamma * exp(-zeta**2/2) * P(zeta); derivatives in closed form
    P = mp.polyval(coeffs[::-1], zeta)
    dP = mp.polyval([j * c for j, c in enumerate(coeffs)][1:][::-1], zeta) if len(coeffs) > 1 else 0
    d2P = (mp.polyval([j * (j - 1) * c for j, c in enumerate(coeffs)][2:][::-1], zeta)
           if len(coeffs) > 2 else 0)
    q = gamma / zeta - zeta          # (zeta**gamma e^{-zeta^2/2})' / itself
    dq = -gamma / zeta**2 - 1
    pref = zeta**gamma * mp.exp(-zeta**2 / 2)
    R = pref * P
    dR = pref * (q * P + dP)
    d2R = pref * ((q**2 + dq) * P + 2 * q * dP + d2P)
    return d2R + dR / zeta - gamma**2 / zeta**2 * R - zeta**2 * R - b / zeta * R + W * R


def verify_polynomial_solution(
    t: TruncationSolution, digits: int = 50, samples: int = 12
) -> mp.mpf:
    """Maximum absolute residual of the canonical equation for ``t``.

    The truncated series is substituted back into the differential equation
    at ``samples`` points in (0, 4] using ``digits`` decimal digits.
    """
    if digits < 20:
        raise ValueError("digits must be at least 20")
    with mp.workdps(digits):
        coeffs = [mp.mpf(c) for c in t.coefficients]
        pts = [mp.mpf(4) * (i + 1) / samples for i in range(samples)]
        return max(abs(_residual_at(t, z, coeffs)) for z in pts)
