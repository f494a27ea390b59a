from __future__ import annotations

import mpmath as mp
import pytest

from heun_spectra.model import DimensionlessProblem

# Lowest three levels at gamma = 1, cross-checked by the variational solver
# (N = 25, 50 digits) and the shooting oracle to ~1e-11.
LEVELS_MINUS_SQRT6 = (1.60035715428136, 6.0, 10.2107281001008)
LEVELS_PLUS_SQRT6 = (6.0, 9.80578408969332, 13.6692889237075)


@pytest.fixture(autouse=True)
def _restore_precision():
    dps = mp.mp.dps
    yield
    mp.mp.dps = dps


def sqrt6():
    with mp.workdps(60):
        return +mp.sqrt(6)


@pytest.fixture
def plus_sqrt6() -> DimensionlessProblem:
    return DimensionlessProblem(1, sqrt6())


@pytest.fixture
def minus_sqrt6() -> DimensionlessProblem:
    return DimensionlessProblem(1, -sqrt6())
