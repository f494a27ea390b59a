"""Riccati-Pade quantization through Hankel determinants.

Writing R = zeta**gamma v(zeta) and f = -v'/v, the canonical equation becomes
the Riccati equation

    -f' + f**2 - (2 gamma + 1) f / zeta + W - zeta**2 - b/zeta = 0,

whose Taylor coefficients follow from

    f_{m+1} = [sum_{i<=m} f_i f_{m-i} + W [m == 0] - [m == 2]] / (m + 2 gamma + 2),
    f_0 = -b / (2 gamma + 1).

Eigenvalues are the values of W at which the Hankel determinants
det[f_{i+j+d+1}]_{i,j<D} vanish, taken as roots that persist with D.

Note that f_j(-b) = (-1)**(j+1) f_j(b), so every Hankel determinant is
exactly even in b: its stable roots are the union of the spectra for b and
-b. ``rpm_spectrum`` therefore sorts each stable root onto its branch by
checking whether the Frobenius solution at that W decays for b or for -b.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import mpmath as mp
from gmpy2 import mpfr

from .errors import InsufficientStableRoots, SeriesTooShort
from .frobenius import series_coefficients
from .model import DimensionlessProblem, EigenvalueEstimate, Method

DEFAULT_DIGITS = 50
DEFAULT_DMAX = 10
MATCH_WINDOW = 0.3
STABILITY_TOL = 1e-10


@dataclass
class RiccatiSeries:
    gamma: object
    b: object
    W: object
    coeffs: list

    def __len__(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class HankelSpec:
    D: int
    d: int = 0

    def __post_init__(self) -> None:
        if self.D < 1 or self.d < 0:
            raise ValueError("need D >= 1 and d >= 0")

    @property
    def terms_needed(self) -> int:
        # largest index used is 2(D - 1) + d + 1
        return 2 * self.D + self.d


@dataclass(frozen=True)
class HankelValue:
    raw: mp.mpf
    scaled: mp.mpf


@dataclass
class RpmRoot:
    W: mp.mpf
    D: int
    drift: float
    stable: bool
    branch: str = "both"

    def as_estimate(self) -> EigenvalueEstimate:
        return EigenvalueEstimate(
            W=self.W, method=Method.RPM, order=self.D, error_gauge=self.drift
        )


def _bits(digits: int) -> int:
    return int(digits * 3.3219280948873626) + 16


def _to_mpfr(x) -> mpfr:
    if isinstance(x, mp.mpf):
        sign, man, exp, _ = x._mpf_
        if not man:
            return mpfr(0)
        v = gmpy2.mul_2exp(mpfr(int(man)), exp)
        return -v if sign else v
    if isinstance(x, (int, str)):
        return mpfr(x)
    return _to_mpfr(mp.mpf(x))


def _from_mpfr(x) -> mp.mpf:
    # mp.mpf(mpfr(0)) yields a malformed zero, so go through (man, exp)
    if not x:
        return mp.mpf(0)
    man, exp = x.as_mantissa_exp()
    return mp.ldexp(mp.mpf(int(man)), int(exp))


def _series(g, b, W, M: int) -> list:
    """Riccati coefficients in whatever float type g, b, W carry."""
    f = [-b / (2 * g + 1)]
    for m in range(M):
        s = 0
        for i in range((m + 1) // 2):
            s += f[i] * f[m - i]
        s *= 2
        if m % 2 == 0:
            s += f[m // 2] * f[m // 2]
        if m == 0:
            s += W
        elif m == 2:
            s -= 1
        f.append(s / (m + 2 * g + 2))
    return f


def riccati_coefficients(gamma, b, W, M: int) -> RiccatiSeries:
    """Coefficients ``f_0 .. f_M`` at the current mpmath precision."""
    if M < 0:
        raise ValueError("M must be non-negative")
    f = _series(mp.mpf(gamma), mp.mpf(b), mp.mpf(W), M)
    return RiccatiSeries(gamma=gamma, b=b, W=mp.mpf(W), coeffs=f)


def _lu_det(rows: list):
    """Determinant by Gaussian elimination with partial pivoting."""
    A = [r[:] for r in rows]
    n = len(A)
    det = A[0][0] * 0 + 1
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(A[i][k]))
        if A[p][k] == 0:
            return det * 0
        if p != k:
            A[k], A[p] = A[p], A[k]
            det = -det
        piv = A[k][k]
        det *= piv
        Ak = A[k]
        for i in range(k + 1, n):
            Ai = A[i]
            fac = Ai[k] / piv
            if fac:
                for j in range(k + 1, n):
                    Ai[j] -= fac * Ak[j]
    return det


def _hankel_rows(coeffs: list, spec: HankelSpec) -> list:
    off = spec.d + 1
    return [[coeffs[i + j + off] for j in range(spec.D)] for i in range(spec.D)]


def hankel_determinant(series: RiccatiSeries, spec: HankelSpec) -> HankelValue:
    """Raw and row-norm scaled determinant of ``[f_{i+j+d+1}]``.

    The scaled value divides by the product of the row 2-norms, i.e. the
    geometric mean of the row norms raised to the power D.
    """
    if len(series) < spec.terms_needed:
        raise SeriesTooShort(
            f"D={spec.D}, d={spec.d} needs {spec.terms_needed} coefficients, "
            f"series has {len(series)}"
        )
    rows = _hankel_rows(series.coeffs, spec)
    raw = _lu_det(rows)
    norm = mp.mpf(1)
    for r in rows:
        norm *= mp.sqrt(mp.fsum(x * x for x in r))
    return HankelValue(raw=raw, scaled=raw / norm if norm else raw)


class _Det:
    """W -> raw Hankel determinant for fixed (gamma, b, D, d), in gmpy2.

    Must be called inside a gmpy2 context of the intended precision.
    """

    def __init__(self, gamma, b, spec: HankelSpec, digits: int):
        self.gamma, self.b, self.spec = _to_mpfr(gamma), _to_mpfr(b), spec
        self.M = spec.terms_needed - 1
        self.fd_step = mpfr(10) ** (-(digits // 3))

    def __call__(self, W):
        f = _series(self.gamma, self.b, W, self.M)
        return _lu_det(_hankel_rows(f, self.spec))

    def log_derivative(self, W, h=None):
        """det'/det by a central difference; ``None`` when det(W) == 0."""
        h = self.fd_step if h is None else min(h, self.fd_step)
        v = self(W)
        if v == 0:
            return None
        return (self(W + h) - self(W - h)) / (2 * h * v)


class _Deflated:
    """Newton quotient of det(W) / prod (W - r)**m over roots already found.

    The quotient has a simple zero at a root of any multiplicity and a
    pole at every non-vanishing extremum of the deflated determinant.
    """

    def __init__(self, det: _Det):
        self.det = det
        self.found: list = []  # [root, multiplicity]

    def __call__(self, W, h=None):
        ld = self.det.log_derivative(W, h)
        if ld is None:
            return mpfr(0)
        for r, m in self.found:
            if W == r:
                return mpfr(0)
            ld -= m / (W - r)
        if ld == 0:
            return gmpy2.inf()
        return 1 / ld

    def add(self, x, merge) -> None:
        for item in self.found:
            if abs(item[0] - x) <= merge:
                item[1] += 1
                return
        self.found.append([x, 1])


def _illinois(u, a, c, tol):
    """Zero of ``u`` in [a, c] with u(a) < 0 < u(c); returns (x, u(x)) or None."""
    ua = u(a, (c - a) / 4)
    uc = u(c, (c - a) / 4)
    if ua == 0:
        return a, ua
    if uc == 0:
        return c, uc
    if not (ua < 0 < uc):
        return None
    side = 0
    best, ubest = (a, ua) if -ua < uc else (c, uc)
    last = None
    for _ in range(300):
        width = c - a
        if width <= tol:
            break
        if gmpy2.is_infinite(ua) or gmpy2.is_infinite(uc):
            x = (a + c) / 2
        else:
            x = (a * uc - c * ua) / (uc - ua)
            if not a < x < c:
                x = (a + c) / 2
        if last is not None and abs(x - last) <= tol:
            break
        last = x
        ux = u(x, width / 4)
        if abs(ux) < abs(ubest):
            best, ubest = x, ux
        if ux == 0:
            break
        if ux < 0:
            a, ua = x, ux
            if side == -1:
                uc /= 2
            side = -1
        else:
            c, uc = x, ux
            if side == 1:
                ua /= 2
            side = 1
    return best, ubest


def _cell_roots(det: _Det, a, c, tol, merge, accept, max_roots: int) -> list:
    """All real roots in [a, c] found by repeated deflation."""
    defl = _Deflated(det)
    for _ in range(max_roots):
        hit = _illinois(defl, a, c, tol)
        if hit is None:
            break
        x, ux = hit
        if not abs(ux) < accept:
            break
        defl.add(x, merge)
    return [r for r, _ in defl.found]


def rpm_roots(
    gamma, b, spec: HankelSpec, window: tuple, grid: int = 200, digits: int = DEFAULT_DIGITS
) -> list:
    """Real roots of the Hankel determinant in ``window``, ascending.

    The window is scanned on a uniform grid. Cells where the determinant
    changes sign or where |det| has a local minimum are searched by an
    Illinois iteration on the Newton quotient det/det', which has a simple
    zero at roots of every multiplicity, with deflation of each root found
    so that close clusters are resolved. Candidates that converge to a pole
    of the quotient (a non-vanishing extremum) are dropped.
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    if grid < 16:
        raise ValueError("grid must be at least 16")
    with gmpy2.context(gmpy2.get_context(), precision=_bits(digits)):
        det = _Det(gamma, b, spec, digits)
        lo, hi = _to_mpfr(lo), _to_mpfr(hi)
        xs = [lo + (hi - lo) * i / grid for i in range(grid + 1)]
        vals = [det(x) for x in xs]
        mags = [abs(v) for v in vals]
        cells = []
        for i in range(grid):
            if vals[i] * vals[i + 1] < 0:
                cells.append((xs[i], xs[i + 1]))
            elif 0 < i and mags[i] <= mags[i - 1] and mags[i] <= mags[i + 1]:
                cells.append((xs[i - 1], xs[i + 1]))
        tol = mpfr(10) ** (-(digits - 10))
        merge = mpfr(10) ** (-(digits // 2))
        # a root of multiplicity m is only pinned to about eps**(1/m)
        distinct = mpfr(10) ** (-(digits // 4))
        accept = mpfr(10) ** (-(digits // 4))
        roots = [x for x, v in zip(xs, vals) if v == 0]
        for a, c in cells:
            scale = max(1, abs(c))
            roots.extend(
                _cell_roots(det, a, c, tol * scale, merge * scale, accept, spec.D + 2)
            )
        roots = sorted(r for r in roots if lo <= r <= hi)
        deduped = []
        for r in roots:
            if not deduped or abs(r - deduped[-1]) > distinct * max(1, abs(r)):
                deduped.append(r)
    with mp.workdps(digits):
        return [_from_mpfr(r) for r in deduped]


def branch_decay(gamma, b, W, digits: int = DEFAULT_DIGITS) -> mp.mpf:
    """|R(zeta_t)| relative to max |R| on [0, zeta_t] for the Frobenius solution.

    zeta_t sits just past the classical turning point, where a bound state
    has started to decay while a non-normalizable solution grows like
    exp(zeta**2/2). The margin is kept small so that an eigenvalue known to
    1e-8 still reads as decaying.
    """
    with mp.workdps(digits):
        g, W = mp.mpf(gamma), mp.mpf(W)
        zt = mp.sqrt(max(W, 0) + 2 * g + abs(mp.mpf(b)) + 1) + 1.5
        count = int(4 * zt * zt) + 60
        a = series_coefficients(g, mp.mpf(b), W, count)

        def R(z):
            return z**g * mp.exp(-z * z / 2) * mp.polyval(a[::-1], z)

        peak = max(abs(R(zt * k / 40)) for k in range(1, 41))
        return abs(R(zt)) / peak


def _drift(r, earlier: list):
    """Distance to the nearest root within MATCH_WINDOW at any earlier order."""
    best = None
    for roots in earlier:
        if not roots:
            continue
        near = min(roots, key=lambda p: abs(p - r))
        d = abs(near - r)
        if d <= MATCH_WINDOW and (best is None or d < best):
            best = d
    return best


def default_window(problem: DimensionlessProblem, n_states: int) -> tuple:
    g, b = float(problem.gamma), float(problem.b)
    lo = min(0.0, -(b / (2 * g + 1)) ** 2 - 0.5) if b else 0.0
    hi = 4 * n_states + 2 * g + 6 + 2 * max(b, 0.0)
    return lo, hi


def rpm_stable_roots(
    problem: DimensionlessProblem,
    window: tuple,
    D_max: int = DEFAULT_DMAX,
    d: int = 0,
    digits: int = DEFAULT_DIGITS,
    grid: int | None = None,
    stability_tol: float = STABILITY_TOL,
    branch: str = "physical",
) -> list:
    """Every stable Hankel root in ``window``, ascending.

    Roots are located at the three highest orders D_max - 2 .. D_max. A
    root found at D_max or D_max - 1 is matched to the nearest root within
    0.3 at each of the other two orders; its drift is the smaller distance
    and it is stable when the drift is below ``stability_tol``. Looking at
    three orders rather than two is needed because a cluster of real roots
    near an eigenvalue can turn into a near-real complex pair at a single
    order, so a true level may be missing from any one of them.

    Stable roots closer than 1e-6 are merged, preferring the higher order.
    A root whose Frobenius solution does not decay for either sign of b is
    dropped. With ``branch="physical"`` roots that belong to the mirrored
    problem -b are dropped as well; ``branch="both"`` keeps the union.
    """
    if D_max < 3:
        raise ValueError("D_max must be at least 3")
    if branch not in ("physical", "both"):
        raise ValueError("branch must be 'physical' or 'both'")
    gamma, b = problem.gamma, problem.b
    if grid is None:
        grid = max(16, int(20 * (window[1] - window[0])))
    with mp.workdps(digits):
        orders = {
            D: rpm_roots(gamma, b, HankelSpec(D, d), window, grid, digits)
            for D in range(max(D_max - 2, 1), D_max + 1)
        }
        candidates = []
        for D in (D_max, D_max - 1):
            others = [orders.get(o, []) for o in (D_max, D_max - 1, D_max - 2) if o != D]
            for r in orders.get(D, []):
                drift = _drift(r, others)
                if drift is not None and drift < stability_tol:
                    candidates.append(RpmRoot(W=r, D=D, drift=float(drift), stable=True))
        candidates.sort(key=lambda c: c.W)
        stable: list = []
        for c in candidates:
            if stable and abs(c.W - stable[-1].W) < 1e-6 * max(1, abs(c.W)):
                prev = stable[-1]
                if (c.D, -c.drift) > (prev.D, -prev.drift):
                    stable[-1] = c
                continue
            stable.append(c)
        kept = []
        for root in stable:
            own = branch_decay(gamma, b, root.W, digits)
            other = own if b == 0 else branch_decay(gamma, -mp.mpf(b), root.W, digits)
            if not (own < 1 or other < 1):
                continue
            if branch == "physical" and (not own < 1 or own > 10 * other):
                continue
            if other <= 10 * own and own <= 10 * other:
                root.branch = "both"
            else:
                root.branch = "physical" if own < other else "mirror"
            kept.append(root)
    return kept


def rpm_spectrum(
    problem: DimensionlessProblem,
    D_max: int = DEFAULT_DMAX,
    d: int = 0,
    n_states: int = 3,
    seeds: list | None = None,
    digits: int = DEFAULT_DIGITS,
    grid: int | None = None,
    stability_tol: float = STABILITY_TOL,
    branch: str = "physical",
) -> list:
    """Lowest ``n_states`` stable Hankel roots for ``problem``.

    See ``rpm_stable_roots`` for the stability rule. Without ``seeds`` the
    search window is ``default_window(problem, n_states)``; with seeds it
    spans them with a margin of 1.

    Raises:
        InsufficientStableRoots: if fewer than ``n_states`` stable roots remain.
    """
    if n_states < 1:
        raise ValueError("n_states must be positive")
    if seeds:
        window = (min(seeds) - 1, max(seeds) + 1)
    else:
        window = default_window(problem, n_states)
    kept = rpm_stable_roots(
        problem, window, D_max=D_max, d=d, digits=digits, grid=grid,
        stability_tol=stability_tol, branch=branch,
    )
    if len(kept) < n_states:
        raise InsufficientStableRoots(
            f"found {len(kept)} stable roots at D_max={D_max}, need {n_states}; "
            "raise D_max or the precision"
        )
    return kept[:n_states]


def root_history(
    problem: DimensionlessProblem, D_max: int, d: int = 0, window=(0, 20),
    digits: int = DEFAULT_DIGITS, grid: int = 400,
) -> dict:
    """Roots per Hankel order, for convergence studies."""
    return {
        D: rpm_roots(problem.gamma, problem.b, HankelSpec(D, d), window, grid, digits)
        for D in range(3, D_max + 1)
    }
