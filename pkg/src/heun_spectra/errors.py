"""Exception types raised by the solvers."""

from __future__ import annotations


class HeunSpectraError(Exception):
    """Base class for all errors raised by this package."""


class ZeroHarmonicTerm(HeunSpectraError):
    """Omega*k vanishes, so there is no Gaussian confinement to scale by."""


class NotCoulombRegime(HeunSpectraError):
    """The closed-form Coulomb spectrum needs k == 0 and f < 0."""


class NoBoundState(HeunSpectraError):
    """The requested parameters support no bound state."""


class DivergentMoment(HeunSpectraError):
    """A Gaussian moment with power p <= -1 was requested."""


class IllConditionedBasis(HeunSpectraError):
    """The overlap matrix is numerically singular at the working precision."""


class SeriesTooShort(HeunSpectraError):
    """The Riccati series has too few coefficients for the Hankel matrix."""


class InsufficientStableRoots(HeunSpectraError):
    """Fewer stable Hankel roots than requested were found."""


class OverflowGuard(HeunSpectraError):
    """The shooting integrator left the representable range."""


class BracketNotFound(HeunSpectraError):
    """No eigenvalue bracket was located in the search window."""
