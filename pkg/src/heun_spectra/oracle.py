"""Brute-force shooting solver and quadrature used as an independent check.

The radial equation is treated in the generic form

    R'' + R'/x - gamma**2/x**2 R - A x**2 R - B/x R + E R = 0,

which covers both the canonical problem (A = 1, B = b, E = W) and the
physical equation in rho after multiplication by 2m. Eigenvalues are
bracketed by Sturm node counting of the regular solution and refined by
bisection on the log-derivative mismatch at a matching point. Everything
here is plain double precision and fixed-step RK4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import integrate

from .errors import BracketNotFound, DivergentMoment, NoBoundState, OverflowGuard
from .model import (
    DimensionlessProblem,
    EigenvalueEstimate,
    Method,
    PhysicalParams,
    QuantumNumbers,
    gamma_of,
)

_RESCALE = 1e100
_SEED_TERMS = 8


@dataclass(frozen=True)
class ShootingConfig:
    zeta_max: float = 10.0
    step: float = 5e-4
    match_point: float = 1.5

    def __post_init__(self) -> None:
        if not 0 < self.match_point < self.zeta_max:
            raise ValueError("need 0 < match_point < zeta_max")
        if not self.step > 0:
            raise ValueError("step must be positive")

    def halved(self) -> ShootingConfig:
        return ShootingConfig(self.zeta_max, self.step / 2, self.match_point)


@njit(cache=True)
def _deriv(x, R, dR, g2, A, B, E):
    return dR, -dR / x + (g2 / (x * x) + A * x * x + B / x - E) * R


@njit(cache=True)
def _rk4(x, R, dR, h, nsteps, g2, A, B, E):
    """Integrate ``nsteps`` RK4 steps of signed size ``h``; count sign changes."""
    nodes = 0
    for _ in range(nsteps):
        k1r, k1d = _deriv(x, R, dR, g2, A, B, E)
        k2r, k2d = _deriv(x + h / 2, R + h * k1r / 2, dR + h * k1d / 2, g2, A, B, E)
        k3r, k3d = _deriv(x + h / 2, R + h * k2r / 2, dR + h * k2d / 2, g2, A, B, E)
        k4r, k4d = _deriv(x + h, R + h * k3r, dR + h * k3d, g2, A, B, E)
        Rn = R + h * (k1r + 2 * k2r + 2 * k3r + k4r) / 6
        dR = dR + h * (k1d + 2 * k2d + 2 * k3d + k4d) / 6
        if (Rn < 0 < R) or (R < 0 < Rn):
            nodes += 1
        R = Rn
        x += h
        big = abs(R) + abs(dR)
        if big > _RESCALE:
            R /= big
            dR /= big
        elif not big < np.inf:
            return x, R, dR, -1
    return x, R, dR, nodes


def _seed(gamma, A, B, E, x0):
    """Regular solution x**gamma * sum c_j x**j and its derivative at ``x0``."""
    c = [1.0]
    for j in range(1, _SEED_TERMS):
        acc = B * c[j - 1]
        if j >= 2:
            acc -= E * c[j - 2]
        if j >= 4:
            acc += A * c[j - 4]
        c.append(acc / (j * (j + 2 * gamma)))
    poly = sum(cj * x0**j for j, cj in enumerate(c))
    dpoly = sum(j * cj * x0 ** (j - 1) for j, cj in enumerate(c) if j)
    R = x0**gamma * poly
    dR = gamma * x0 ** (gamma - 1) * poly + x0**gamma * dpoly if gamma else dpoly
    return R, dR


@dataclass(frozen=True)
class _Radial:
    gamma: float
    A: float
    B: float

    def outward(self, E, x_end, h):
        x0 = h
        R, dR = _seed(self.gamma, self.A, self.B, E, x0)
        n = max(int(round((x_end - x0) / h)), 1)
        hh = (x_end - x0) / n
        x, R, dR, nodes = _rk4(x0, R, dR, hh, n, self.gamma**2, self.A, self.B, E)
        if nodes < 0:
            raise OverflowGuard("outward integration overflowed")
        return R, dR, nodes

    def inward(self, E, x_start, x_end, h):
        # decaying start: R = tiny, R'/R from the local WKB momentum
        q = self.gamma**2 / x_start**2 + self.A * x_start**2 + self.B / x_start - E
        kappa = math.sqrt(q) if q > 0 else 0.0
        R, dR = 1e-30, -kappa * 1e-30
        n = max(int(round((x_start - x_end) / h)), 1)
        hh = -(x_start - x_end) / n
        x, R, dR, nodes = _rk4(x_start, R, dR, hh, n, self.gamma**2, self.A, self.B, E)
        if nodes < 0:
            raise OverflowGuard("inward integration overflowed")
        return R, dR, nodes

    def mismatch(self, E, x_max, match, h):
        Ro, dRo, no = self.outward(E, match, h)
        Ri, dRi, ni = self.inward(E, x_max, match, h)
        return dRo / Ro - dRi / Ri, no + ni

    def count(self, E, x_max, h):
        return self.outward(E, x_max, h)[2]

    def eigenvalue(self, index, x_max, match, h, guess_hi):
        """Bracket state ``index`` by Sturm counts, refine on the mismatch."""
        lo, hi = -1.0, max(guess_hi, 1.0)
        for _ in range(200):
            if self.count(lo, x_max, h) <= index:
                break
            lo = 2 * lo - 1
        else:
            raise BracketNotFound("no lower bracket")
        for _ in range(200):
            if self.count(hi, x_max, h) > index:
                break
            hi = 2 * hi + 1
        else:
            raise BracketNotFound("no upper bracket")
        while hi - lo > 1e-6 * max(1.0, abs(hi)):
            mid = (lo + hi) / 2
            if self.count(mid, x_max, h) > index:
                hi = mid
            else:
                lo = mid
        flo = self.mismatch(lo, x_max, match, h)[0]
        fhi = self.mismatch(hi, x_max, match, h)[0]
        use_mismatch = np.isfinite(flo) and np.isfinite(fhi) and flo * fhi < 0
        for _ in range(200):
            if hi - lo <= 1e-13 * max(1.0, abs(hi)):
                break
            mid = (lo + hi) / 2
            if use_mismatch:
                fm = self.mismatch(mid, x_max, match, h)[0]
                if fm * flo > 0:
                    lo, flo = mid, fm
                else:
                    hi = mid
            elif self.count(mid, x_max, h) > index:
                hi = mid
            else:
                lo = mid
        return (lo + hi) / 2


def integrate_radial(
    problem: DimensionlessProblem, W: float, cfg: ShootingConfig = ShootingConfig()
) -> tuple[float, int]:
    """Log-derivative mismatch at ``cfg.match_point`` and total node count."""
    rad = _Radial(float(problem.gamma), 1.0, float(problem.b))
    return rad.mismatch(float(W), cfg.zeta_max, cfg.match_point, cfg.step)


def oracle_eigenvalue(
    problem: DimensionlessProblem,
    state_index: int,
    cfg: ShootingConfig = ShootingConfig(),
) -> EigenvalueEstimate:
    """Eigenvalue ``state_index`` (0 = ground) by shooting, Richardson-corrected."""
    if state_index < 0:
        raise ValueError("state_index must be non-negative")
    g, b = float(problem.gamma), float(problem.b)
    rad = _Radial(g, 1.0, b)
    top = 4 * state_index + 2 * g + 6 + abs(b)
    coarse = rad.eigenvalue(state_index, cfg.zeta_max, cfg.match_point, cfg.step, top)
    fine = rad.eigenvalue(state_index, cfg.zeta_max, cfg.match_point, cfg.step / 2, top)
    # RK4 error ~ h**4
    delta = (fine - coarse) / 15
    return EigenvalueEstimate(
        W=fine + delta,
        method=Method.ORACLE,
        order=1,
        error_gauge=abs(delta),
        extra={"coarse": coarse, "fine": fine},
    )


def physical_oracle(
    p: PhysicalParams,
    q: QuantumNumbers,
    state_index: int,
    cfg: ShootingConfig = ShootingConfig(),
) -> float:
    """Energy of state ``state_index`` from shooting directly in rho.

    No dimensionless reduction is used: the grid is only scaled by the
    natural length of the confining term (harmonic or Coulomb).
    """
    gs = gamma_of(q)
    gamma = abs(gs)
    A = 2 * p.mass * (p.omega * p.k) ** 2
    B = 2 * p.mass * p.f
    offset = -2 * p.omega * p.k * gs + (p.k + q.spin * p.omega / 2) ** 2
    if A > 0:
        length = A ** -0.25
        x_max = cfg.zeta_max * length
        top = (4 * state_index + 2 * gamma + 6) / length**2 + abs(B) / length
    else:
        if p.k == 0 and not B < 0:
            raise NoBoundState(f"k = 0 with f = {p.f} >= 0 has no planar bound state")
        if not B < 0:
            raise NoBoundState("no confinement: Omega*k = 0 and f >= 0")
        nu = state_index + gamma + 0.5
        length = 2 * nu / abs(B)          # inverse decay rate of state index
        x_max = 4 * cfg.zeta_max * length
        top = -1e-12 * B**2
    rad = _Radial(gamma, A, B)
    h = cfg.step * length
    match = cfg.match_point * length
    coarse = rad.eigenvalue(state_index, x_max, match, h, top)
    fine = rad.eigenvalue(state_index, x_max, match, h / 2, top)
    E = fine + (fine - coarse) / 15
    return (E + offset) / (2 * p.mass)


def quadrature_moment(p: float) -> float:
    """``int_0^inf zeta**p exp(-zeta**2)`` by adaptive quadrature."""
    if p <= -1:
        raise DivergentMoment(f"moment diverges for p = {p}")
    # split at 1 so the algebraic end-point singularity stays in a finite piece
    head, _ = integrate.quad(lambda z: z**p * math.exp(-z * z), 0, 1,
                             epsabs=1e-14, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(lambda z: z**p * math.exp(-z * z), 1, np.inf,
                             epsabs=1e-14, epsrel=1e-13, limit=200)
    return head + tail


def quadrature_elements(problem: DimensionlessProblem, i: int, j: int) -> tuple[float, float]:
    """``(H_ij, S_ij)`` by direct quadrature of the defining integrals."""
    g, b = float(problem.gamma), float(problem.b)
    ci, cj = g + i, g + j

    def u(c, z):
        return z**c * math.exp(-z * z / 2)

    def du(c, z):
        return (c * z ** (c - 1) - z ** (c + 1)) * math.exp(-z * z / 2) if c else -z * math.exp(-z * z / 2)

    def h_integrand(z):
        kin = du(ci, z) * du(cj, z)
        pot = (g * g / z**2 + z * z + b / z) * u(ci, z) * u(cj, z)
        return (kin + pot) * z

    def s_integrand(z):
        return u(ci, z) * u(cj, z) * z

    opts = dict(epsabs=0, epsrel=1e-13, limit=400)
    H = sum(integrate.quad(h_integrand, a, c, **opts)[0] for a, c in ((0, 1), (1, np.inf)))
    S = sum(integrate.quad(s_integrand, a, c, **opts)[0] for a, c in ((0, 1), (1, np.inf)))
    return H, S
