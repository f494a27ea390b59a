"""Rayleigh-Ritz solver in the basis u_j = zeta**(gamma+j) exp(-zeta**2/2).

All matrix elements reduce to Gaussian moments

    I(p) = int_0^inf zeta**p exp(-zeta**2) dzeta = Gamma((p + 1)/2) / 2,

so the Hamiltonian and overlap matrices are exact up to rounding. The
monomial Gram matrix is badly conditioned, hence the whole pipeline runs
in mpmath at a configurable number of decimal digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp

from .errors import DivergentMoment, IllConditionedBasis
from .model import DimensionlessProblem, EigenvalueEstimate, Method

DEFAULT_DIGITS = 50
DEFAULT_BASIS = 20
MAX_BASIS = 40


@dataclass(frozen=True)
class BasisSpec:
    gamma: object
    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("basis size must be at least 1")


@dataclass
class MatrixPair:
    H: mp.matrix
    S: mp.matrix

    @property
    def size(self) -> int:
        return self.S.rows


@dataclass
class VariationalSpectrum:
    problem: DimensionlessProblem
    estimates: list

    @property
    def values(self) -> list:
        return [e.W for e in self.estimates]


@lru_cache(maxsize=4096)
def _moment_cached(p, prec: int) -> mp.mpf:
    return mp.gamma((p + 1) / 2) / 2


def gaussian_moment(p) -> mp.mpf:
    """``int_0^inf zeta**p exp(-zeta**2) dzeta`` at the current mpmath precision."""
    p = mp.mpf(p)
    if p <= -1:
        raise DivergentMoment(f"moment diverges for p = {p}")
    return _moment_cached(p, mp.mp.prec)


def build_matrices(problem: DimensionlessProblem, N: int) -> MatrixPair:
    """Hamiltonian and overlap matrices of size ``N`` under the measure zeta dzeta.

    The kinetic part uses the symmetric form int u_i' u_j' zeta dzeta, so
    H is symmetric by construction. Terms whose prefactor is exactly zero
    are skipped; this avoids the divergent I(-1) at gamma = 0.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    g = mp.mpf(problem.gamma)
    b = mp.mpf(problem.b)
    I = gaussian_moment
    H = mp.matrix(N, N)
    S = mp.matrix(N, N)
    for i in range(N):
        for j in range(i, N):
            ci, cj = g + i, g + j
            s = 2 * g + i + j
            S[i, j] = S[j, i] = I(s + 1)
            # derivative cross term ci*cj and centrifugal gamma**2 share I(s - 1)
            h = -(ci + cj) * I(s + 1) + 2 * I(s + 3)
            pref = ci * cj + g * g
            if pref != 0:
                h += pref * I(s - 1)
            if b != 0:
                h += b * I(s)
            H[i, j] = H[j, i] = h
    return MatrixPair(H=H, S=S)


def _cholesky(S: mp.matrix, digits: int) -> mp.matrix:
    n = S.rows
    L = mp.matrix(n, n)
    floor = mp.mpf(10) ** (-(digits - 8))
    for j in range(n):
        d = S[j, j] - mp.fsum(L[j, k] ** 2 for k in range(j))
        # S arrives with unit diagonal, so d is already the relative pivot
        if d < floor:
            raise IllConditionedBasis(
                f"overlap pivot {mp.nstr(d, 3)} at index {j} below 1e-{digits - 8}; "
                "reduce the basis size or raise the precision"
            )
        L[j, j] = mp.sqrt(d)
        for i in range(j + 1, n):
            L[i, j] = (S[i, j] - mp.fsum(L[i, k] * L[j, k] for k in range(j))) / L[j, j]
    return L


def _lower_solve(L: mp.matrix, B: mp.matrix) -> mp.matrix:
    n, m = B.rows, B.cols
    X = mp.matrix(n, m)
    for c in range(m):
        for i in range(n):
            X[i, c] = (B[i, c] - mp.fsum(L[i, k] * X[k, c] for k in range(i))) / L[i, i]
    return X


def solve_generalized(mp_pair: MatrixPair, digits: int | None = None) -> list:
    """All eigenvalues of ``H c = W S c`` in ascending order.

    S is first scaled to unit diagonal, then Cholesky-reduced to the
    standard symmetric problem L^-1 H L^-T, which mpmath diagonalizes by
    Householder tridiagonalization and implicit QL.
    """
    if digits is None:
        digits = mp.mp.dps
    n = mp_pair.size
    with mp.workdps(digits):
        scale = [1 / mp.sqrt(mp_pair.S[i, i]) for i in range(n)]
        S = mp.matrix(n, n)
        H = mp.matrix(n, n)
        for i in range(n):
            for j in range(n):
                S[i, j] = mp_pair.S[i, j] * scale[i] * scale[j]
                H[i, j] = mp_pair.H[i, j] * scale[i] * scale[j]
        L = _cholesky(S, digits)
        Y = _lower_solve(L, H)              # L^-1 H
        A = _lower_solve(L, Y.T)            # L^-1 (L^-1 H)^T = L^-1 H L^-T
        for i in range(n):
            for j in range(i + 1, n):
                A[i, j] = A[j, i] = (A[i, j] + A[j, i]) / 2
        evals = mp.eigsy(A, eigvals_only=True)
        return sorted(evals[i] for i in range(n))


def eigenvalues(problem: DimensionlessProblem, N: int, digits: int = DEFAULT_DIGITS) -> list:
    with mp.workdps(digits):
        return solve_generalized(build_matrices(problem, N), digits)


def variational_spectrum(
    problem: DimensionlessProblem,
    N: int = DEFAULT_BASIS,
    digits: int = DEFAULT_DIGITS,
    n_states: int = 3,
) -> VariationalSpectrum:
    """Lowest ``n_states`` Rayleigh-Ritz upper bounds with basis size ``N``.

    Each estimate's error gauge is the drop of that bound when the basis
    grows from N - 1 to N.
    """
    if n_states > N - 2:
        raise ValueError(f"n_states={n_states} needs N >= {n_states + 2}, got {N}")
    if N > MAX_BASIS:
        raise ValueError(f"basis size capped at {MAX_BASIS}")
    with mp.workdps(digits):
        big = build_matrices(problem, N)
        small = MatrixPair(H=big.H[: N - 1, : N - 1], S=big.S[: N - 1, : N - 1])
        upper = solve_generalized(big, digits)
        lower = solve_generalized(small, digits)
    estimates = [
        EigenvalueEstimate(
            W=upper[j],
            method=Method.VARIATIONAL,
            order=N,
            error_gauge=float(max(lower[j] - upper[j], 0)),
        )
        for j in range(n_states)
    ]
    return VariationalSpectrum(problem=problem, estimates=estimates)
