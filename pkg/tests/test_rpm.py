from __future__ import annotations

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LEVELS_MINUS_SQRT6, LEVELS_PLUS_SQRT6, sqrt6
from heun_spectra.errors import InsufficientStableRoots, SeriesTooShort
from heun_spectra.model import DimensionlessProblem
from heun_spectra.rpm import (
    HankelSpec,
    branch_decay,
    hankel_determinant,
    riccati_coefficients,
    root_history,
    rpm_roots,
    rpm_spectrum,
    rpm_stable_roots,
)
from heun_spectra.variational import variational_spectrum

TINY = mp.mpf(10) ** -40


def test_first_coefficients():
    with mp.workdps(50):
        s = riccati_coefficients(1, sqrt6(), mp.mpf("2.5"), 4)
        assert abs(s.coeffs[0] + sqrt6() / 3) < TINY
        assert abs(s.coeffs[1] - (mp.mpf("2.5") + s.coeffs[0] ** 2) / 4) < TINY


def test_even_coefficients_vanish_at_b0():
    s = riccati_coefficients(1, 0, 3, 21)
    assert all(s.coeffs[j] == 0 for j in range(0, 22, 2))


@given(st.floats(-3, 3), st.floats(-5, 15), st.sampled_from([0, 0.5, 1, 2.5]))
@settings(max_examples=30, deadline=None)
def test_coefficient_parity(b, W, gamma):
    with mp.workdps(40):
        plus = riccati_coefficients(gamma, b, W, 28).coeffs
        minus = riccati_coefficients(gamma, -b, W, 28).coeffs
        for j, (p, m) in enumerate(zip(plus, minus)):
            assert abs(m - (-1) ** (j + 1) * p) <= mp.mpf(10) ** -30 * max(1, abs(p))


def test_small_determinants():
    s = riccati_coefficients(1, 0, mp.mpf("2.5"), 4)
    f = s.coeffs
    assert hankel_determinant(s, HankelSpec(1)).raw == f[1]
    d2 = hankel_determinant(s, HankelSpec(2)).raw
    assert abs(d2 - f[1] * f[3]) < mp.mpf(10) ** -14 * abs(f[1] * f[3])
    with pytest.raises(SeriesTooShort):
        hankel_determinant(s, HankelSpec(3))


@pytest.mark.parametrize("D,d", [(3, 0), (5, 0), (4, 1), (6, 2)])
def test_determinant_parity(D, d):
    with mp.workdps(40):
        M = 2 * D + d
        a = hankel_determinant(riccati_coefficients(1, mp.mpf("1.3"), mp.mpf("2.5"), M), HankelSpec(D, d))
        b = hankel_determinant(riccati_coefficients(1, mp.mpf("-1.3"), mp.mpf("2.5"), M), HankelSpec(D, d))
        assert abs(abs(a.raw) - abs(b.raw)) <= mp.mpf(10) ** -30 * abs(a.raw)
        assert abs(a.scaled) <= 1


def test_polynomial_solution_not_a_root_at_D2():
    # W = 6 has multiplicity D - 2, so the first order where it shows is D = 3
    with mp.workdps(50):
        at = hankel_determinant(riccati_coefficients(1, sqrt6(), 6, 4), HankelSpec(2)).scaled
        assert abs(at) > 0.1


@pytest.mark.parametrize("D", range(3, 9))
def test_polynomial_solution_is_a_root_at_every_order(D):
    with mp.workdps(50):
        M = 2 * D
        at = hankel_determinant(riccati_coefficients(1, sqrt6(), 6, M), HankelSpec(D)).scaled
        off = hankel_determinant(riccati_coefficients(1, sqrt6(), mp.mpf("6.5"), M), HankelSpec(D)).scaled
        assert abs(at) < mp.mpf(10) ** -35
        assert abs(at) < mp.mpf(10) ** -20 * abs(off)


def test_roots_are_union_of_both_signs(plus_sqrt6):
    roots = rpm_roots(1, sqrt6(), HankelSpec(6), (0, 12), grid=240)
    for target, tol in ((1.600357, 1e-5), (6.0, 1e-12), (9.805784, 1e-3)):
        assert min(abs(r - target) for r in roots) < tol
    mirrored = rpm_roots(1, -sqrt6(), HankelSpec(6), (0, 12), grid=240)
    assert len(roots) == len(mirrored)
    assert all(abs(a - b) < 1e-10 for a, b in zip(roots, mirrored))


def test_oscillator_roots():
    roots = rpm_roots(1, 0, HankelSpec(6), (0, 10), grid=160)
    assert any(abs(r - 4) < 1e-12 for r in roots)
    assert any(abs(r - 8) < 1e-12 for r in roots)


def test_spurious_zero_is_discarded():
    hist = root_history(DimensionlessProblem(1, 0), 12, window=(-1, 14), grid=300)
    assert any(abs(r) < 1e-20 for r in hist[10])
    assert not any(abs(r) < 1e-20 for r in hist[11] + hist[12])
    roots = rpm_spectrum(DimensionlessProblem(1, 0), D_max=10)
    assert [float(r.W) for r in roots] == pytest.approx([4, 8, 12], abs=1e-20)


def test_branch_decay_separates_signs():
    b = sqrt6()
    W = mp.mpf(LEVELS_MINUS_SQRT6[0])
    assert branch_decay(1, -b, W) < 1e-2
    assert branch_decay(1, b, W) > 0.5


def test_physical_branch_minus_sqrt6(minus_sqrt6):
    roots = rpm_spectrum(minus_sqrt6, D_max=14)
    assert [float(r.W) for r in roots] == pytest.approx(LEVELS_MINUS_SQRT6, abs=1e-9)
    assert all(r.drift < 1e-9 and r.stable for r in roots)


def test_physical_branch_plus_sqrt6(plus_sqrt6):
    roots = rpm_spectrum(plus_sqrt6, D_max=14)
    assert [float(r.W) for r in roots] == pytest.approx(LEVELS_PLUS_SQRT6, abs=1e-9)


def test_raw_stable_roots_are_even_in_b(plus_sqrt6, minus_sqrt6):
    a = rpm_stable_roots(plus_sqrt6, (0, 12), D_max=12, branch="both")
    b = rpm_stable_roots(minus_sqrt6, (0, 12), D_max=12, branch="both")
    assert len(a) == len(b) >= 3
    assert all(abs(x.W - y.W) < 1e-10 for x, y in zip(a, b))


def test_insufficient_roots_at_low_order(plus_sqrt6):
    with pytest.raises(InsufficientStableRoots):
        rpm_spectrum(plus_sqrt6, D_max=6)


@pytest.mark.parametrize("b", [0, 2, -2.449489742783178, 2.449489742783178])
def test_agrees_with_variational(b):
    problem = DimensionlessProblem(1, mp.mpf(b))
    roots = rpm_spectrum(problem, D_max=14)
    var = variational_spectrum(problem, N=25).estimates
    for r, v in zip(roots, var):
        assert abs(r.W - v.W) <= max(r.drift, v.error_gauge) + 1e-8


def test_drift_shrinks_with_order(minus_sqrt6):
    hist = root_history(minus_sqrt6, 14, window=(0, 12), grid=240)
    for target in LEVELS_MINUS_SQRT6[:1] + LEVELS_MINUS_SQRT6[2:]:
        near = [min(hist[D], key=lambda r: abs(r - target)) for D in range(7, 15)]
        drifts = [abs(a - b) for a, b in zip(near[1:], near)]
        rises = sum(1 for x, y in zip(drifts, drifts[1:]) if y > x)
        assert rises <= 1
        assert drifts[-1] < 1e-10


def test_argument_checks():
    with pytest.raises(ValueError):
        HankelSpec(0)
    with pytest.raises(ValueError):
        rpm_roots(1, 0, HankelSpec(3), (2, 1))
    with pytest.raises(ValueError):
        rpm_roots(1, 0, HankelSpec(3), (0, 1), grid=8)
    with pytest.raises(ValueError):
        rpm_spectrum(DimensionlessProblem(1, 0), D_max=2)
