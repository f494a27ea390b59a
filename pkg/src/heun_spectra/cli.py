"""Command-line front end: spectra, truncation loci, reduction, sweeps, verify.

Exit codes: 0 ok, 1 verify failure, 2 usage error, 3 methods disagree,
4 a solver raised.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import mpmath as mp

from . import acceptance
from .errors import HeunSpectraError
from .frobenius import solve_truncation, verify_polynomial_solution
from .model import (
    DimensionlessProblem,
    Method,
    PhysicalParams,
    QuantumNumbers,
    coulomb_limit_spectrum,
    diagnose,
    reduce,
)
from .oracle import oracle_eigenvalue
from .rpm import DEFAULT_DMAX, rpm_spectrum
from .variational import DEFAULT_BASIS, DEFAULT_DIGITS, variational_spectrum

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DISAGREE, EXIT_METHOD = 0, 1, 2, 3, 4
AGREEMENT_TOL = 1e-6
CAPTURE_TOL = 1e-8
ENV_DIGITS = "HEUN_SPECTRA_DIGITS"
SPECTRUM_HEADER = ["index", "W", "error_gauge", "method", "order"]
SWEEP_HEADER = ["b", "state_index", "W", "method"]


def num(x) -> float:
    """Round to 15 significant digits for serialization."""
    if isinstance(x, (mp.mpf, mp.mpc)):
        return float(mp.nstr(mp.re(x), 15))
    return float(f"{float(x):.15g}")


def fmt(x) -> str:
    return f"{num(x):.15g}"


@dataclass
class Report:
    command: str
    inputs: dict
    results: list = field(default_factory=list)
    agreement: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def as_json(self) -> str:
        body = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "agreement": self.agreement,
        }
        body.update(self.extra)
        return json.dumps(body, indent=2) + "\n"


# argument helpers


def _default_digits() -> int:
    raw = os.environ.get(ENV_DIGITS)
    if raw is None:
        return DEFAULT_DIGITS
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_DIGITS
    return value if value >= 20 else DEFAULT_DIGITS


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from exc
    if value < 0:
        raise argparse.ArgumentTypeError("b-squared must be non-negative")
    return value


def _methods(text: str) -> list[Method]:
    names = [t.strip().lower() for t in text.split(",") if t.strip()]
    valid = {m.value: m for m in Method if m is not Method.TRUNCATION}
    bad = [n for n in names if n not in valid]
    if not names or bad:
        raise argparse.ArgumentTypeError(
            f"methods must be a comma list from {sorted(valid)}; got {text!r}"
        )
    out = []
    for n in names:
        if valid[n] not in out:
            out.append(valid[n])
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--digits", type=int, default=None,
                   help=f"working decimal digits (default {DEFAULT_DIGITS} or ${ENV_DIGITS})")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--output", default="-", help="output file (default stdout)")


def _add_problem(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", required=True, help="centrifugal strength (>= 0)")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--b", help="Coulomb coefficient as a decimal literal")
    grp.add_argument("--b-squared", type=_rational,
                     help="exact rational b**2; b = +sqrt unless --negative-b")
    p.add_argument("--negative-b", action="store_true", help="take the negative root of --b-squared")


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--basis-size", type=_positive_int, default=DEFAULT_BASIS)
    p.add_argument("--hankel-dmax", type=int, default=DEFAULT_DMAX)
    p.add_argument("--hankel-offset", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heun-spectra",
        description="Bound states of R'' + R'/z - g^2/z^2 R - z^2 R - b/z R + W R = 0.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="lowest eigenvalues by several methods")
    _add_problem(p)
    _add_solver(p)
    p.add_argument("--methods", type=_methods, default=_methods("variational,rpm"))
    p.add_argument("--states", type=_positive_int, default=3)
    _add_common(p)

    p = sub.add_parser("truncate", help="b values with a polynomial solution of degree n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--basis-size", type=_positive_int, default=DEFAULT_BASIS)
    p.add_argument("--states", type=_positive_int, default=3)
    _add_common(p)

    p = sub.add_parser("reduce", help="map physical parameters to (gamma, b)")
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--f", type=float, required=True)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--spin", type=int, choices=(1, -1), default=1)
    p.add_argument("--states", type=_positive_int, default=3)
    _add_common(p)

    p = sub.add_parser("sweep", help="variational curves W_j(b) over a grid of b")
    p.add_argument("--gamma", required=True)
    p.add_argument("--b-min", type=float, required=True)
    p.add_argument("--b-max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--states", type=_positive_int, default=3)
    p.add_argument("--basis-size", type=_positive_int, default=DEFAULT_BASIS)
    p.add_argument("--truncation", action="store_true",
                   help="append truncation loci inside the range as method=truncation")
    p.add_argument("--truncation-nmax", type=int, default=4)
    p.add_argument("--workers", type=_positive_int, default=min(4, os.cpu_count() or 1))
    _add_common(p)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], default=None,
                   help="comma list of criterion numbers")
    _add_common(p)
    return parser


def _gamma(text: str, parser: argparse.ArgumentParser):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        parser.error(f"--gamma must be a number, got {text!r}")
    if value < 0:
        parser.error("--gamma must be non-negative")
    return int(value) if value.denominator == 1 else value


def _problem(args, parser, digits: int) -> DimensionlessProblem:
    gamma = _gamma(args.gamma, parser)
    with mp.workdps(digits + 10):
        if args.b is not None:
            try:
                b = mp.mpf(args.b)
            except (ValueError, TypeError):
                parser.error(f"--b must be a decimal number, got {args.b!r}")
        else:
            sq = args.b_squared
            b = mp.sqrt(mp.mpf(sq.numerator) / sq.denominator)
            if args.negative_b:
                b = -b
        b = +b
    g = gamma if isinstance(gamma, int) else mp.mpf(gamma.numerator) / gamma.denominator
    return DimensionlessProblem(g, b)


# commands


def _run_method(method: Method, problem, args, digits: int):
    if method is Method.VARIATIONAL:
        return variational_spectrum(
            problem, N=args.basis_size, digits=digits, n_states=args.states
        ).estimates
    if method is Method.RPM:
        roots = rpm_spectrum(
            problem, D_max=args.hankel_dmax, d=args.hankel_offset,
            n_states=args.states, digits=digits,
        )
        return [r.as_estimate() for r in roots]
    return [oracle_eigenvalue(problem, j) for j in range(args.states)]


def cmd_spectrum(args, parser, digits: int):
    if args.basis_size < args.states + 2:
        parser.error(f"--basis-size must be at least states + 2 = {args.states + 2}")
    if args.hankel_dmax < 3 or args.hankel_offset < 0:
        parser.error("--hankel-dmax must be >= 3 and --hankel-offset >= 0")
    problem = _problem(args, parser, digits)
    report = Report(
        "spectrum",
        {
            "gamma": num(problem.gamma), "b": num(problem.b), "states": args.states,
            "methods": [m.value for m in args.methods], "digits": digits,
            "basis_size": args.basis_size, "hankel_dmax": args.hankel_dmax,
            "hankel_offset": args.hankel_offset,
        },
    )
    values = {}
    for method in args.methods:
        try:
            ests = _run_method(method, problem, args, digits)
        except HeunSpectraError as exc:
            print(f"error: {method.value}: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_METHOD, report
        values[method.value] = [e.W for e in ests]
        report.results.append({
            "method": method.value,
            "order": ests[0].order if ests else 0,
            "states": [
                {"index": j, "W": num(e.W), "error_gauge": num(e.error_gauge)}
                for j, e in enumerate(ests)
            ],
        })
    worst = 0.0
    for a, c in combinations(values, 2):
        dev = max(abs(float(x) - float(y)) for x, y in zip(values[a], values[c]))
        report.agreement[f"{a}-{c}"] = num(dev)
        worst = max(worst, dev)
    return (EXIT_DISAGREE if worst > AGREEMENT_TOL else EXIT_OK), report


def _spectrum_text(report: Report, fmt_: str) -> str:
    rows = [
        [str(s["index"]), fmt(s["W"]), fmt(s["error_gauge"]), r["method"], str(r["order"])]
        for r in report.results for s in r["states"]
    ]
    if fmt_ == "csv":
        return _csv(SPECTRUM_HEADER, rows)
    inp = report.inputs
    lines = [f"gamma = {fmt(inp['gamma'])}, b = {fmt(inp['b'])}, digits = {inp['digits']}", ""]
    lines += _table(SPECTRUM_HEADER, rows)
    if report.agreement:
        lines.append("")
        for pair, dev in report.agreement.items():
            flag = "ok" if dev <= AGREEMENT_TOL else "DISAGREE"
            lines.append(f"max |{pair}| = {dev:.3e}  {flag}")
    return "\n".join(lines) + "\n"


def cmd_truncate(args, parser, digits: int):
    if args.n < 0:
        parser.error("--n must be non-negative")
    if args.basis_size < args.states + 2:
        parser.error(f"--basis-size must be at least states + 2 = {args.states + 2}")
    gamma = _gamma(args.gamma, parser)
    sols = solve_truncation(args.n, gamma, digits=digits)
    report = Report("truncate", {"n": args.n, "gamma": str(gamma), "digits": digits})
    for s in sols:
        resid = verify_polynomial_solution(s, digits=max(digits, 20))
        spec = variational_spectrum(
            s.problem, N=args.basis_size, digits=digits, n_states=args.states
        )
        W = mp.mpf(s.W.numerator) / s.W.denominator if isinstance(s.W, Fraction) else s.W
        captured = [j for j, w in enumerate(spec.values) if abs(w - W) < CAPTURE_TOL]
        report.results.append({
            "method": Method.TRUNCATION.value,
            "order": args.n,
            "b": num(s.b_root),
            "b_exact": None if s.b_exact is None else str(s.b_exact),
            "W": num(W),
            "coefficients": [num(c) for c in s.coefficients],
            "residual": num(resid),
            "captured_index": captured[0] if captured else None,
            "states": [
                {"index": j, "W": num(e.W), "error_gauge": num(e.error_gauge),
                 "captured": j in captured}
                for j, e in enumerate(spec.estimates)
            ],
        })
    return EXIT_OK, report


def _truncate_text(report: Report, fmt_: str) -> str:
    header = ["b", "b_exact", "W", "captured_index", "residual"]
    rows = [
        [fmt(r["b"]), r["b_exact"] or "", fmt(r["W"]),
         "" if r["captured_index"] is None else str(r["captured_index"]), f"{r['residual']:.3e}"]
        for r in report.results
    ]
    if fmt_ == "csv":
        return _csv(header, rows)
    lines = [f"n = {report.inputs['n']}, gamma = {report.inputs['gamma']}: "
             f"{len(report.results)} real root(s) of a_(n+1)(b) = 0", ""]
    for r in report.results:
        exact = r["b_exact"] or ""
        exact = "" if exact.lstrip("-").isdigit() else f" = {exact}"
        lines.append(f"b = {fmt(r['b'])}{exact}   W = {fmt(r['W'])}   residual {r['residual']:.2e}")
        lines.append("  a_j: " + ", ".join(fmt(c) for c in r["coefficients"]))
        lines.append("  variational spectrum at this b:")
        for s in r["states"]:
            mark = "<- truncation" if s["captured"] else "   missed"
            lines.append(f"    W_{s['index']} = {fmt(s['W']):<20} {mark}")
        lines.append("")
    return "\n".join(lines)


def cmd_reduce(args, parser, digits: int):
    if not args.mass > 0:
        parser.error("--mass must be positive")
    p = PhysicalParams(args.mass, args.omega, args.k, args.f)
    q = QuantumNumbers(args.l, args.spin)
    diag = diagnose(p)
    report = Report(
        "reduce",
        {"mass": args.mass, "omega": args.omega, "k": args.k, "f": args.f,
         "l": args.l, "spin": args.spin},
    )
    report.extra["diagnosis"] = {
        "three_d_bound_states": diag.three_d_bound_states,
        "planar_bound_states": diag.planar_bound_states.value,
        "message": diag.message,
    }
    if args.omega * args.k != 0:
        r = reduce(p, q)
        report.extra["reduction"] = {
            "gamma": num(r.problem.gamma), "b": num(r.problem.b), "lambda": num(r.lam),
            "energy_scale": num(r.energy_scale), "energy_offset": num(r.energy_offset),
        }
    elif args.k == 0 and args.f < 0:
        energies = coulomb_limit_spectrum(p, q, args.states - 1)
        report.results.append({
            "method": "coulomb_limit",
            "order": 0,
            "states": [{"index": j, "E": num(e)} for j, e in enumerate(energies)],
        })
    return EXIT_OK, report


def _reduce_text(report: Report, fmt_: str) -> str:
    d = report.extra["diagnosis"]
    red = report.extra.get("reduction")
    if fmt_ == "csv":
        header = ["quantity", "value"]
        rows = [["three_d_bound_states", str(d["three_d_bound_states"]).lower()],
                ["planar_bound_states", d["planar_bound_states"]]]
        if red:
            rows += [[k, fmt(v)] for k, v in red.items()]
        for r in report.results:
            rows += [[f"E_{s['index']}", fmt(s["E"])] for s in r["states"]]
        return _csv(header, rows)
    lines = [
        f"3D bound states: {'yes' if d['three_d_bound_states'] else 'none'}",
        f"planar regime: {d['planar_bound_states']}",
        d["message"],
    ]
    if red:
        lines += [
            "",
            f"gamma = {fmt(red['gamma'])}",
            f"b     = {fmt(red['b'])}",
            f"lambda = {fmt(red['lambda'])}   (zeta = lambda * rho)",
            f"E = {fmt(red['energy_scale'])} * W - ({fmt(red['energy_offset'])})",
        ]
    for r in report.results:
        lines += ["", "Coulomb-limit energies:"]
        lines += [f"  E_{s['index']} = {fmt(s['E'])}" for s in r["states"]]
    return "\n".join(lines) + "\n"


def _sweep_point(task):
    gamma, b_text, N, digits, states = task
    with mp.workdps(digits):
        problem = DimensionlessProblem(gamma, mp.mpf(b_text))
        spec = variational_spectrum(problem, N=N, digits=digits, n_states=states)
    return [mp.nstr(w, 17) for w in spec.values]


def cmd_sweep(args, parser, digits: int):
    if not args.b_min < args.b_max:
        parser.error("--b-min must be below --b-max")
    if args.points < 2:
        parser.error("--points must be at least 2")
    if args.basis_size < args.states + 2:
        parser.error(f"--basis-size must be at least states + 2 = {args.states + 2}")
    gamma = _gamma(args.gamma, parser)
    g = gamma if isinstance(gamma, int) else str(float(gamma))
    grid = [
        args.b_min + (args.b_max - args.b_min) * i / (args.points - 1) for i in range(args.points)
    ]
    tasks = [(g, repr(b), args.basis_size, digits, args.states) for b in grid]
    try:
        if args.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                curves = list(pool.map(_sweep_point, tasks))
        else:
            curves = [_sweep_point(t) for t in tasks]
    except HeunSpectraError as exc:
        print(f"error: variational: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_METHOD, Report("sweep", {})
    records = [
        (b, j, float(w), Method.VARIATIONAL.value)
        for b, ws in zip(grid, curves) for j, w in enumerate(ws)
    ]
    if args.truncation:
        for n in range(args.truncation_nmax + 1):
            for s in solve_truncation(n, gamma, digits=digits):
                if not args.b_min <= s.b_root <= args.b_max:
                    continue
                W = float(s.W)
                ws = variational_spectrum(
                    s.problem, N=args.basis_size, digits=digits,
                    n_states=min(args.basis_size - 2, args.states + n + 1),
                ).values
                idx = min(range(len(ws)), key=lambda j: abs(ws[j] - W))
                records.append((float(s.b_root), idx, W, Method.TRUNCATION.value))
    records.sort(key=lambda r: (r[0], r[1], r[3]))
    report = Report(
        "sweep",
        {"gamma": str(gamma), "b_min": args.b_min, "b_max": args.b_max,
         "points": args.points, "states": args.states, "basis_size": args.basis_size,
         "digits": digits, "truncation": args.truncation},
    )
    report.extra["records"] = [
        {"b": num(b), "state_index": j, "W": num(w), "method": m} for b, j, w, m in records
    ]
    return EXIT_OK, report


def _sweep_text(report: Report, fmt_: str) -> str:
    rows = [[fmt(r["b"]), str(r["state_index"]), fmt(r["W"]), r["method"]]
            for r in report.extra["records"]]
    if fmt_ == "csv":
        return _csv(SWEEP_HEADER, rows)
    return "\n".join(_table(SWEEP_HEADER, rows)) + "\n"


def cmd_verify(args, parser, digits: int):
    numbers = args.only or [n for n, _, _ in acceptance.CRITERIA]
    bad = [n for n in numbers if not 1 <= n <= len(acceptance.CRITERIA)]
    if bad:
        parser.error(f"unknown criterion number(s): {bad}")
    echo = print if args.format == "table" and args.output == "-" else None
    results = []
    for n in numbers:
        res = acceptance.run_criterion(n)
        if echo:
            echo(res.line(), flush=True)
        results.append(res)
    report = Report("verify", {"criteria": numbers})
    report.extra["criteria"] = [
        {"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
        for r in results
    ]
    passed = sum(r.passed for r in results)
    report.extra["summary"] = {"passed": passed, "failed": len(results) - passed}
    report.extra["streamed"] = echo is not None
    return (EXIT_OK if passed == len(results) else EXIT_VERIFY), report


def _verify_text(report: Report, fmt_: str) -> str:
    crit = report.extra["criteria"]
    if fmt_ == "csv":
        return _csv(["number", "passed", "title", "detail"],
                    [[str(c["number"]), str(c["passed"]).lower(), c["title"], c["detail"]]
                     for c in crit])
    lines = [] if report.extra["streamed"] else [
        f"[{'PASS' if c['passed'] else 'FAIL'}] {c['number']:2d}. {c['title']}: {c['detail']}"
        for c in crit
    ]
    s = report.extra["summary"]
    lines.append(f"{s['passed']} passed, {s['failed']} failed")
    return "\n".join(lines) + "\n"


# rendering


def _csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _table(header: list, rows: list) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    line = "  ".join(h.ljust(w) for h, w in zip(header, widths))
    out = [line, "-" * len(line)]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return out


COMMANDS = {
    "spectrum": (cmd_spectrum, _spectrum_text),
    "truncate": (cmd_truncate, _truncate_text),
    "reduce": (cmd_reduce, _reduce_text),
    "sweep": (cmd_sweep, _sweep_text),
    "verify": (cmd_verify, _verify_text),
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    digits = args.digits if args.digits is not None else _default_digits()
    if digits < 20:
        parser.error("--digits must be at least 20")
    run, render = COMMANDS[args.command]
    code, report = run(args, parser, digits)
    if code == EXIT_METHOD and not report.inputs:
        return code
    if args.format == "json":
        if args.command == "verify":
            report.extra.pop("streamed", None)
        text = report.as_json()
    else:
        text = render(report, args.format)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
