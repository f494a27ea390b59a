"""Bound-state spectra of the harmonic + Coulomb-like radial equation.

    R'' + R'/zeta - gamma**2/zeta**2 R - zeta**2 R - b/zeta R + W R = 0

is solved by exact Frobenius truncation, Rayleigh-Ritz bounds and the
Riccati-Pade method, with a double-precision shooting oracle as an
independent check.
"""

from .errors import HeunSpectraError
from .frobenius import solve_truncation, verify_polynomial_solution
from .model import (
    DimensionlessProblem,
    EigenvalueEstimate,
    Method,
    PhysicalParams,
    QuantumNumbers,
    coulomb_limit_spectrum,
    diagnose,
    energy_from_W,
    reduce,
)
from .oracle import oracle_eigenvalue, physical_oracle
from .rpm import rpm_spectrum
from .variational import variational_spectrum

__all__ = [
    "DimensionlessProblem",
    "EigenvalueEstimate",
    "HeunSpectraError",
    "Method",
    "PhysicalParams",
    "QuantumNumbers",
    "coulomb_limit_spectrum",
    "diagnose",
    "energy_from_W",
    "oracle_eigenvalue",
    "physical_oracle",
    "reduce",
    "rpm_spectrum",
    "solve_truncation",
    "variational_spectrum",
    "verify_polynomial_solution",
]

__version__ = "0.1.0"
