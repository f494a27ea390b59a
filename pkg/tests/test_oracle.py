from __future__ import annotations

import math

import pytest

from conftest import LEVELS_MINUS_SQRT6, LEVELS_PLUS_SQRT6
from heun_spectra.errors import DivergentMoment, NoBoundState
from heun_spectra.model import (
    DimensionlessProblem,
    PhysicalParams,
    QuantumNumbers,
    coulomb_limit_spectrum,
    energy_from_W,
    reduce,
)
from heun_spectra.oracle import (
    ShootingConfig,
    integrate_radial,
    oracle_eigenvalue,
    physical_oracle,
    quadrature_moment,
)
from heun_spectra.variational import gaussian_moment

S6 = math.sqrt(6)


def test_config_validation():
    with pytest.raises(ValueError):
        ShootingConfig(match_point=12.0)
    with pytest.raises(ValueError):
        ShootingConfig(step=0.0)
    assert ShootingConfig().halved().step == pytest.approx(2.5e-4)


def test_mismatch_at_oscillator_ground_state():
    mismatch, nodes = integrate_radial(DimensionlessProblem(1, 0), 4.0)
    assert abs(mismatch) < 1e-6 and nodes == 0
    off, _ = integrate_radial(DimensionlessProblem(1, 0), 5.0)
    assert abs(off) > 0.1


def test_mismatch_at_polynomial_solution():
    # W = 6 is the first excited state for b = -sqrt6 and the ground state for +sqrt6
    mismatch, nodes = integrate_radial(DimensionlessProblem(1, -S6), 6.0)
    assert abs(mismatch) < 1e-6 and nodes == 1
    mismatch, nodes = integrate_radial(DimensionlessProblem(1, S6), 6.0)
    assert abs(mismatch) < 1e-6 and nodes == 0


def test_oscillator_levels():
    for j, exact in enumerate((4, 8, 12)):
        est = oracle_eigenvalue(DimensionlessProblem(1, 0), j)
        assert est.W == pytest.approx(exact, abs=1e-8)
        assert est.error_gauge < 1e-7


@pytest.mark.parametrize("b,levels", [(-S6, LEVELS_MINUS_SQRT6), (S6, LEVELS_PLUS_SQRT6)])
def test_levels_at_sqrt6(b, levels):
    got = [oracle_eigenvalue(DimensionlessProblem(1, b), j).W for j in range(3)]
    assert got == pytest.approx(levels, abs=1e-8)


@pytest.mark.parametrize("gamma", [0, 1])
@pytest.mark.parametrize("b", [0, S6, -S6, 2])
def test_node_theorem(gamma, b):
    problem = DimensionlessProblem(gamma, b)
    for j in range(3):
        W = oracle_eigenvalue(problem, j).W
        assert integrate_radial(problem, W)[1] == j


def test_step_halving_is_small():
    for j in range(3):
        est = oracle_eigenvalue(DimensionlessProblem(1, 2.0), j)
        assert abs(est.extra["fine"] - est.extra["coarse"]) < 1e-7


def test_negative_index():
    with pytest.raises(ValueError):
        oracle_eigenvalue(DimensionlessProblem(1, 0), -1)


def test_physical_matches_reduction():
    p, q = PhysicalParams(1.3, 0.7, -1.1, 0.6), QuantumNumbers(1, -1)
    r = reduce(p, q)
    for j in range(3):
        W = oracle_eigenvalue(r.problem, j).W
        assert physical_oracle(p, q, j) == pytest.approx(energy_from_W(W, r, p, q), rel=1e-6)


def test_physical_coulomb_limit():
    p, q = PhysicalParams(0.8, 0.3, 0.0, -1.5), QuantumNumbers(0, 1)
    closed = coulomb_limit_spectrum(p, q, 2)
    assert [physical_oracle(p, q, j) for j in range(3)] == pytest.approx(closed, abs=1e-6)


def test_repulsive_coulomb_alone_has_no_bound_state():
    with pytest.raises(NoBoundState):
        physical_oracle(PhysicalParams(1, 0.5, 0.0, 1.0), QuantumNumbers(0), 0)


def test_quadrature_moments():
    assert quadrature_moment(1) == pytest.approx(0.5, abs=1e-14)
    assert quadrature_moment(0) == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-14)
    assert quadrature_moment(6.2) == pytest.approx(float(gaussian_moment(6.2)), rel=1e-12)
    with pytest.raises(DivergentMoment):
        quadrature_moment(-1)
