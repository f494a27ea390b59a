"""Acceptance suite shared by ``heun-spectra verify`` and the test-suite.

Every check is run at its stated tolerance and reports the observed
numbers, so a failure says exactly how far off the build is.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import mpmath as mp
import sympy as sp

from .errors import HeunSpectraError
from .frobenius import _mpf, solve_truncation, verify_polynomial_solution
from .model import (
    DimensionlessProblem,
    PhysicalParams,
    QuantumNumbers,
    coulomb_limit_spectrum,
    diagnose,
    energy_from_W,
    reduce,
)
from .oracle import oracle_eigenvalue, physical_oracle
from .rpm import rpm_spectrum, rpm_stable_roots
from .variational import eigenvalues, variational_spectrum

REFERENCE = (mp.mpf("1.600357154"), mp.mpf("6.000000000"), mp.mpf("10.21072810"))
TRUNCATION_SCAN = 6


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d}. {self.title} ({self.seconds:.1f} s): {self.detail}"


def _fmt(values, digits: int = 12) -> str:
    return "(" + ", ".join(mp.nstr(v, digits) for v in values) + ")"


def _sqrt6():
    with mp.workdps(60):
        return +mp.sqrt(6)


def _reference_problem() -> DimensionlessProblem:
    return DimensionlessProblem(1, _sqrt6())


def check_reference_values() -> tuple[bool, str]:
    problem = _reference_problem()
    t0 = time.perf_counter()
    var = variational_spectrum(problem, N=25, digits=50).values
    var_dev = [abs(v - r) for v, r in zip(var, REFERENCE)]
    ok = all(d < 1e-8 for d in var_dev)
    parts = [f"variational N=25 {_fmt(var)} max dev {mp.nstr(max(var_dev), 3)}"]
    try:
        roots = rpm_spectrum(problem, D_max=12, d=0, n_states=3, digits=50)
        rpm_vals = [r.W for r in roots]
        rpm_dev = [abs(v - r) for v, r in zip(rpm_vals, REFERENCE)]
        ok = ok and all(d < 1e-8 for d in rpm_dev)
        parts.append(f"RPM D_max=12 {_fmt(rpm_vals)} max dev {mp.nstr(max(rpm_dev), 3)}")
    except HeunSpectraError as exc:
        ok = False
        parts.append(f"RPM D_max=12 {type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - t0
    parts.append(f"target {_fmt(REFERENCE, 10)}; runtime {elapsed:.1f} s (target < 60 s)")
    return ok, "; ".join(parts)


def check_exact_truncation() -> tuple[bool, str]:
    sols = solve_truncation(1, 1, digits=50)
    squares = [sp.nsimplify(s.b_exact**2) if s.b_exact is not None else None for s in sols]
    exact = len(sols) == 2 and all(q == 6 for q in squares)
    signs = sorted(int(sp.sign(s.b_exact)) for s in sols) == [-1, 1] if exact else False
    W_ok = all(s.W == 6 for s in sols)
    res = [verify_polynomial_solution(s, digits=50) for s in sols]
    ok = exact and signs and W_ok and all(r < mp.mpf("1e-40") for r in res)
    return ok, (
        f"b = {[str(s.b_exact) for s in sols]}, b^2 = {[str(q) for q in squares]}, "
        f"W = {[str(s.W) for s in sols]}, residuals {_fmt(res, 3)}"
    )


def truncation_set(problem: DimensionlessProblem, n_max: int = TRUNCATION_SCAN) -> list:
    """Truncation eigenvalues W = 2 gamma + 2n + 2 available at exactly this b."""
    out = []
    b = problem.b
    for n in range(n_max + 1):
        for s in solve_truncation(n, problem.gamma, digits=50):
            if abs(s.b_root - b) < mp.mpf("1e-30") * max(1, abs(b)):
                out.append(_mpf(s.W))
    return sorted(out)


def check_conditional_solvability() -> tuple[bool, str]:
    problem = _reference_problem()
    captured = truncation_set(problem)
    spectrum = variational_spectrum(problem, N=25, digits=50).values
    ok = [float(w) for w in captured] == [6.0]
    parts = [f"truncation set at b=+sqrt6 {_fmt(captured)}", f"spectrum {_fmt(spectrum)}"]
    for target in (REFERENCE[0], REFERENCE[2]):
        hit = min(spectrum, key=lambda w: abs(w - target))
        present = abs(hit - target) < 1e-8
        gap = min(abs(hit - w) for w in captured) if captured else mp.inf
        ok = ok and present and gap > 1
        parts.append(
            f"{mp.nstr(target, 10)}: nearest state {mp.nstr(hit, 12)} "
            f"({'present' if present else 'absent'}), distance to truncation set {mp.nstr(gap, 4)}"
        )
    missed = [w for w in spectrum if min(abs(w - c) for c in captured) > 1] if captured else spectrum
    parts.append(f"states missed by truncation {_fmt(missed)}")
    return ok, "; ".join(parts)


def check_parity() -> tuple[bool, str]:
    plus = _reference_problem()
    minus = plus.mirrored()
    window = (0, 16)
    rp = [r.W for r in rpm_stable_roots(plus, window, D_max=12, branch="both")]
    rm = [r.W for r in rpm_stable_roots(minus, window, D_max=12, branch="both")]
    rpm_ok = len(rp) == len(rm) and all(abs(a - c) < 1e-10 for a, c in zip(rp, rm))
    vp = variational_spectrum(plus, N=25).values
    vm = variational_spectrum(minus, N=25).values
    var_dev = max(abs(a - c) for a, c in zip(vp, vm))
    var_ok = var_dev < 1e-8
    return rpm_ok and var_ok, (
        f"RPM stable roots +b {_fmt(rp)} vs -b {_fmt(rm)} "
        f"({'agree' if rpm_ok else 'differ'}); variational +b {_fmt(vp)} vs -b {_fmt(vm)}, "
        f"max dev {mp.nstr(var_dev, 4)}"
    )


def check_monotonicity() -> tuple[bool, str]:
    problem = _reference_problem()
    with mp.workdps(50):
        levels = {N: eigenvalues(problem, N, 50)[:3] for N in range(5, 27)}
    worst = max(
        levels[N + 1][j] - levels[N][j] for N in range(5, 26) for j in range(3)
    )
    return worst <= 1e-12, f"max increase W_j(N+1) - W_j(N) over N=5..25, j=0..2: {mp.nstr(worst, 3)}"


def check_oscillator() -> tuple[bool, str]:
    problem = DimensionlessProblem(1, mp.mpf(0))
    exact = [4, 8, 12]
    var = [float(w) for w in variational_spectrum(problem).values]
    rpm = [float(r.W) for r in rpm_spectrum(problem)]
    orc = [oracle_eigenvalue(problem, j).W for j in range(3)]
    rows = (var, rpm, orc)
    dev = max(abs(x - e) for row in rows for x, e in zip(row, exact))
    spread = max(max(col) - min(col) for col in zip(*rows))
    return dev < 1e-6 and spread < 1e-6, (
        f"variational {var}, RPM {rpm}, oracle {[round(x, 9) for x in orc]}; "
        f"max dev {dev:.2e}, max spread {spread:.2e}"
    )


def check_oracle_equivalence() -> tuple[bool, str]:
    s6 = _sqrt6()
    worst, where = 0.0, None
    for gamma in (0, 1):
        for b in (mp.mpf(-3), -s6, mp.mpf(0), mp.mpf("0.5"), s6, mp.mpf(4)):
            problem = DimensionlessProblem(gamma, b)
            var = variational_spectrum(problem, N=25).values
            for j in range(3):
                dev = abs(float(var[j]) - oracle_eigenvalue(problem, j).W)
                if dev > worst:
                    worst, where = dev, (gamma, float(b), j)
    return worst < 1e-5, f"max |oracle - variational| = {worst:.2e} at (gamma, b, j) = {where}"


PHYSICAL_CASES = (
    (PhysicalParams(1.0, 0.5, 1.0, -0.3), QuantumNumbers(0, 1)),
    (PhysicalParams(0.7, 1.2, -0.8, 0.4), QuantumNumbers(1, -1)),
    (PhysicalParams(2.0, -0.6, 0.9, -1.1), QuantumNumbers(-2, 1)),
    (PhysicalParams(1.5, 0.8, 1.3, 0.0), QuantumNumbers(2, 1)),
)


def check_reduction() -> tuple[bool, str]:
    worst = 0.0
    for p, q in PHYSICAL_CASES:
        r = reduce(p, q)
        var = variational_spectrum(r.problem, N=25).values
        for j in range(3):
            E = energy_from_W(var[j], r, p, q)
            ref = physical_oracle(p, q, j)
            worst = max(worst, abs(E - ref) / max(abs(ref), 1e-300))
    return worst < 1e-6, (
        f"{len(PHYSICAL_CASES)} parameter sets x 3 states, max relative deviation {worst:.2e}"
    )


COULOMB_CASES = (
    (PhysicalParams(1.0, 0.0, 0.0, -1.0), QuantumNumbers(0, 1)),
    (PhysicalParams(0.5, 0.7, 0.0, -2.0), QuantumNumbers(1, -1)),
    (PhysicalParams(2.0, -0.4, 0.0, -0.5), QuantumNumbers(-1, 1)),
)


def check_coulomb() -> tuple[bool, str]:
    worst = 0.0
    for p, q in COULOMB_CASES:
        closed = coulomb_limit_spectrum(p, q, 2)
        for j in range(3):
            worst = max(worst, abs(closed[j] - physical_oracle(p, q, j)))
    return worst < 1e-6, f"{len(COULOMB_CASES)} cases x 3 states, max |closed - oracle| {worst:.2e}"


def check_diagnosis() -> tuple[bool, str]:
    count, bad = 0, 0
    for k in (-1.5, 0.0, 2.0):
        for f in (-1.0, 0.0, 0.8):
            for omega in (-0.5, 0.0, 1.0):
                d = diagnose(PhysicalParams(1.0, omega, k, f))
                count += 1
                bad += bool(d.three_d_bound_states)
    return bad == 0, f"{count} parameter sets, {bad} reported 3D bound states"


CRITERIA: tuple[tuple[int, str, Callable[[], tuple[bool, str]]], ...] = (
    (1, "reference eigenvalues at gamma=1, b=sqrt6", check_reference_values),
    (2, "exact truncation n=1, gamma=1", check_exact_truncation),
    (3, "conditional solvability at b=sqrt6", check_conditional_solvability),
    (4, "parity W(-b) = W(b)", check_parity),
    (5, "variational upper-bound monotonicity", check_monotonicity),
    (6, "oscillator closed form", check_oscillator),
    (7, "oracle equivalence", check_oracle_equivalence),
    (8, "reduction against physical shooting", check_reduction),
    (9, "Coulomb limit", check_coulomb),
    (10, "no 3D bound states", check_diagnosis),
)


def run_criterion(number: int) -> CriterionResult:
    _, title, fn = CRITERIA[number - 1]
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except HeunSpectraError as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - t0)


def run_all(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for number, _, _ in CRITERIA:
        res = run_criterion(number)
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
