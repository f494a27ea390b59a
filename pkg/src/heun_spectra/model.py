"""Domain types and the physical <-> dimensionless reduction.

The physical radial problem is

    -(R'' + R'/rho)/(2m) + gamma_s**2/(2 m rho**2) R - Omega k gamma_s/m R
        + (k + s Omega/2)**2/(2m) R + Omega**2 k**2 rho**2 R + f/rho R = E R

for the planar motion of a spin-1/2 particle in a medium with a dislocation
density Omega. With zeta = lam*rho and lam = (2m)**(1/4) sqrt(|Omega k|) it
becomes the canonical equation solved everywhere else in the package:

    R'' + R'/zeta - gamma**2/zeta**2 R - zeta**2 R - b/zeta R + W R = 0.

The full three-dimensional problem carries a plane wave exp(i k z), which is
never square integrable along z, so none of its states are bound.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

from .errors import NotCoulombRegime, ZeroHarmonicTerm


class Method(str, enum.Enum):
    TRUNCATION = "truncation"
    VARIATIONAL = "variational"
    RPM = "rpm"
    ORACLE = "oracle"


class PlanarRegime(str, enum.Enum):
    ALL_F = "AllF"
    ONLY_NEGATIVE_F = "OnlyNegativeF"


@dataclass(frozen=True)
class QuantumNumbers:
    l: int
    spin: int = 1

    def __post_init__(self) -> None:
        if self.spin not in (1, -1):
            raise ValueError(f"spin must be +1 or -1, got {self.spin}")


@dataclass(frozen=True)
class PhysicalParams:
    mass: float
    omega: float
    k: float
    f: float

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class DimensionlessProblem:
    """Centrifugal strength ``gamma`` (>= 0) and Coulomb coefficient ``b``."""

    gamma: Any
    b: Any

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")

    def mirrored(self) -> DimensionlessProblem:
        return DimensionlessProblem(self.gamma, -self.b)


@dataclass(frozen=True)
class ReductionResult:
    problem: DimensionlessProblem
    lam: float
    energy_scale: float
    energy_offset: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError("length scale must be positive")


@dataclass(frozen=True)
class Diagnosis:
    three_d_bound_states: bool
    planar_bound_states: PlanarRegime
    message: str


@dataclass
class EigenvalueEstimate:
    W: Any
    method: Method
    order: int
    error_gauge: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.error_gauge < 0:
            raise ValueError("error gauge must be non-negative")


def gamma_of(q: QuantumNumbers) -> float:
    """Signed centrifugal label ``l + (1 - spin)/2``."""
    return q.l + (1 - q.spin) / 2


def _bracket_constant(p: PhysicalParams, q: QuantumNumbers) -> float:
    # 2m*E = lam**2 * W + c  with  c = -2 Omega k gamma_s + (k + s Omega/2)**2
    return -2.0 * p.omega * p.k * gamma_of(q) + (p.k + q.spin * p.omega / 2) ** 2


def reduce(p: PhysicalParams, q: QuantumNumbers) -> ReductionResult:
    """Map the physical radial equation onto ``DimensionlessProblem``.

    Raises:
        ZeroHarmonicTerm: if ``omega * k == 0``; the k = 0 case has no
            Gaussian confinement and is handled by ``coulomb_limit_spectrum``.
    """
    if p.omega * p.k == 0:
        raise ZeroHarmonicTerm(
            "Omega*k = 0: no harmonic confinement, use the Coulomb limit instead"
        )
    lam = (2 * p.mass) ** 0.25 * math.sqrt(abs(p.omega * p.k))
    b = 2 * p.mass * p.f / lam
    problem = DimensionlessProblem(gamma=abs(gamma_of(q)), b=b)
    return ReductionResult(
        problem=problem,
        lam=lam,
        energy_scale=lam**2 / (2 * p.mass),
        energy_offset=-_bracket_constant(p, q) / (2 * p.mass),
    )


def energy_from_W(
    W: float, r: ReductionResult, p: PhysicalParams, q: QuantumNumbers
) -> float:
    """Physical energy for the dimensionless eigenvalue ``W``."""
    return (float(W) * r.lam**2 + _bracket_constant(p, q)) / (2 * p.mass)


def W_from_energy(
    energy: float, r: ReductionResult, p: PhysicalParams, q: QuantumNumbers
) -> float:
    return (2 * p.mass * energy - _bracket_constant(p, q)) / r.lam**2


def diagnose(p: PhysicalParams) -> Diagnosis:
    """Classify which bound states the model supports.

    The z factor exp(i k z) has constant modulus, so the norm integral over
    z diverges for every parameter set: there are never 3D bound states.
    Restricted to the plane, the harmonic term confines for any f when
    k != 0; with k = 0 only an attractive Coulomb term (f < 0) binds.
    """
    lines = [
        "No 3D bound states: |exp(i k z)|^2 = 1, so the norm integral over z "
        "diverges for every choice of parameters."
    ]
    if p.k != 0:
        regime = PlanarRegime.ALL_F
        if p.omega == 0:
            lines.append(
                "Omega = 0 removes the harmonic term; planar binding then "
                "requires f < 0."
            )
        else:
            lines.append(
                f"Planar motion (k = {p.k:g} != 0): the harmonic term confines, "
                "bound states exist for every f, either sign of k."
            )
    else:
        regime = PlanarRegime.ONLY_NEGATIVE_F
        if p.f < 0:
            lines.append(
                f"Planar motion with k = 0: attractive Coulomb term f = {p.f:g} "
                "binds a hydrogen-like series."
            )
        else:
            lines.append(
                f"Planar motion with k = 0: f = {p.f:g} >= 0 is not attractive, "
                "no planar bound state for this f."
            )
    return Diagnosis(
        three_d_bound_states=False, planar_bound_states=regime, message=" ".join(lines)
    )


def coulomb_limit_spectrum(
    p: PhysicalParams, q: QuantumNumbers, n_max: int
) -> list[float]:
    """Planar hydrogen-like energies for k = 0, f < 0, levels ``n = 0..n_max``."""
    if p.k != 0 or not p.f < 0:
        raise NotCoulombRegime(
            f"closed form needs k = 0 and f < 0 (got k={p.k}, f={p.f})"
        )
    gamma = abs(gamma_of(q))
    shift = p.omega**2 / (8 * p.mass)
    return [
        -p.mass * p.f**2 / (2 * (n + gamma + 0.5) ** 2) + shift
        for n in range(n_max + 1)
    ]
