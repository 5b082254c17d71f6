"""Command-line front end.

    sincfred solve    --example 1 --method convolution --N 50
    sincfred study    --example 4 --lambda 0.1,0.4,0.7,0.9 --method convolution --N 10,20,30,40,50
    sincfred validate --format csv

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import core
from .approx import sinc_quadrature, singular_split_quadrature
from .benchmarks import METHODS, ErrorReport, convergence_study, get_example, solve, sup_error
from .collocation import CollocationSystem
from .convolution import ConvolutionSystem, build_A_matrices, build_operator_data, eigendecompose
from .errors import NumericalFailure, ParameterError, SincError
from .newton import NewtonConfig

__all__ = ["main", "build_parser", "format_float", "CSV_HEADER", "MAX_WORKERS_ENV"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
CSV_HEADER = "method,example,lambda,N,sup_error,iterations,runtime_ms"
MAX_WORKERS_ENV = "SINCFRED_MAX_WORKERS"
TABLE_POINTS = 21
EVAL_POINTS = 1001


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def format_float(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.17g}"


def _csv_row(r: ErrorReport) -> str:
    it = "" if r.iterations is None else str(r.iterations)
    return ",".join(
        [r.method, r.example, format_float(r.lam), str(r.N), format_float(r.sup_error), it, format_float(r.runtime_ms)]
    )


# -- argument types ----------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError(f"N must be >= 2, got {v}")
    return v


def _int_list(text: str) -> list[int]:
    return [_positive_int(part) for part in text.split(",") if part.strip()]


def _lambda_value(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"lambda must lie in (0,1), got {v:g}")
    return v


def _lambda_list(text: str) -> list[float]:
    return [_lambda_value(part) for part in text.split(",") if part.strip()]


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _d_value(text: str) -> float:
    v = _positive_float(text)
    if v >= math.pi:
        raise argparse.ArgumentTypeError(f"d must lie in (0, pi), got {v:g}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sincfred", description="Sinc solvers for weakly singular nonlinear Fredholm equations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, many):
        p.add_argument("--example", type=int, choices=(1, 2, 3, 4), required=True)
        if many:
            p.add_argument("--lambda", dest="lam", type=_lambda_list, help="comma-separated, example 4 only")
            p.add_argument("--N", type=_int_list, default=[10, 20, 30, 40, 50], help="comma-separated list")
        else:
            p.add_argument("--lambda", dest="lam", type=_lambda_value, help="example 4 only")
            p.add_argument("--N", type=_positive_int, default=30)
        p.add_argument("--method", choices=(*METHODS, "both"), default="both")
        p.add_argument("--alpha", type=_positive_float, help="grading exponent (default: per example)")
        p.add_argument("--d", type=_d_value, default=3.14)
        p.add_argument("--tol", type=_positive_float, default=1e-12)
        p.add_argument("--output", "-o", help="write to this file instead of stdout")

    solve_p = sub.add_parser("solve", help="solve one example and tabulate the solution")
    common(solve_p, many=False)
    solve_p.add_argument("--format", choices=("csv", "human"), default="human")

    study_p = sub.add_parser("study", help="convergence study over a list of N (CSV)")
    common(study_p, many=True)

    val_p = sub.add_parser("validate", help="run the fast self-check suite")
    val_p.add_argument("--format", choices=("csv", "human"), default="human")
    val_p.add_argument("--output", "-o")
    return parser


def _methods(name: str) -> tuple[str, ...]:
    return METHODS if name == "both" else (name,)


def _check_lambda(args, lams):
    if args.example == 4 and not lams:
        raise UsageError("example 4 needs --lambda")
    if args.example != 4 and lams:
        raise UsageError("--lambda applies to example 4 only")


@contextlib.contextmanager
def _open_output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            yield fh


def _max_workers() -> int:
    raw = os.environ.get(MAX_WORKERS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        v = int(raw)
    except ValueError:
        raise UsageError(f"{MAX_WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if v < 1:
        raise UsageError(f"{MAX_WORKERS_ENV} must be a positive integer, got {raw!r}")
    return v


# -- commands ----------------------------------------------------------------


def cmd_solve(args) -> int:
    _check_lambda(args, [args.lam] if args.lam is not None else [])
    bp = get_example(args.example, args.lam)
    cfg = NewtonConfig(tol=args.tol)
    iv = bp.problem.iv
    table_t = np.linspace(iv.a, iv.b, TABLE_POINTS)
    status = EXIT_OK
    rows, tables = [], []
    for method in _methods(args.method):
        t0 = time.perf_counter()
        try:
            sol = solve(bp, method, args.N, args.alpha, args.d, cfg)
        except NumericalFailure as exc:
            print(f"{method}: {type(exc).__name__}: {exc}", file=sys.stderr)
            ms = 1e3 * (time.perf_counter() - t0)
            rows.append(ErrorReport(method, bp.name, bp.lam, args.N, None, None, ms, EVAL_POINTS, failure=str(exc)))
            status = EXIT_NUMERICAL
            continue
        ms = 1e3 * (time.perf_counter() - t0)
        err = sup_error(sol, bp.exact, iv, EVAL_POINTS)
        rep = sol.newton_report
        rows.append(ErrorReport(method, bp.name, bp.lam, args.N, err, rep.iterations, ms, EVAL_POINTS, rep.final_residual))
        uN = np.asarray(sol(table_t), dtype=float)
        u = np.asarray(bp.exact(table_t), dtype=float)
        tables.append((method, uN, u))

    with _open_output(args.output) as out:
        if args.format == "csv":
            out.write(CSV_HEADER + "\n")
            for r in rows:
                out.write(_csv_row(r) + "\n")
            out.write("\nmethod,t,u_N,u,abs_error\n")
            for method, uN, u in tables:
                for t, a, b in zip(table_t, uN, u):
                    out.write(f"{method},{format_float(t)},{format_float(a)},{format_float(b)},{format_float(abs(a - b))}\n")
        else:
            for r in rows:
                if r.sup_error is None:
                    out.write(f"{r.method:<12} {r.example}  N={r.N}  FAILED: {r.failure}\n")
                else:
                    out.write(
                        f"{r.method:<12} {r.example}  lambda={r.lam:g}  N={r.N}  sup_error={r.sup_error:.3e}  "
                        f"iterations={r.iterations}  residual={r.final_residual:.2e}  runtime={r.runtime_ms:.1f} ms\n"
                    )
            for method, uN, u in tables:
                out.write(f"\n{method}\n{'t':>8} {'u_N(t)':>22} {'u(t)':>22} {'|error|':>10}\n")
                for t, a, b in zip(table_t, uN, u):
                    out.write(f"{t:8.4f} {a:22.15e} {b:22.15e} {abs(a - b):10.2e}\n")
    return status


def cmd_study(args) -> int:
    lams = args.lam or []
    _check_lambda(args, lams)
    Ns = sorted(args.N)
    if len(Ns) < 4 or len(set(Ns)) != len(Ns):
        raise UsageError("--N needs at least 4 distinct values")
    cfg = NewtonConfig(tol=args.tol)
    problems = [get_example(args.example, lam) for lam in lams] if lams else [get_example(args.example)]
    problems.sort(key=lambda bp: bp.lam)
    workers = _max_workers()
    status = EXIT_OK
    with _open_output(args.output) as out:
        out.write(CSV_HEADER + "\n")
        trailers = []
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for method in _methods(args.method):
                for bp in problems:
                    reports, fit = convergence_study(
                        bp, method, Ns, args.alpha, args.d, cfg, EVAL_POINTS, executor=pool if workers > 1 else None
                    )
                    for r in reports:
                        out.write(_csv_row(r) + "\n")
                        if r.failure is not None:
                            print(f"{method} {bp.name} N={r.N}: {r.failure}", file=sys.stderr)
                            status = EXIT_NUMERICAL
                    slope, r2 = (fit.slope, fit.r_squared) if fit is not None else (math.nan, math.nan)
                    trailers.append(
                        f"# rate_slope={format_float(slope)} r2={format_float(r2)} method={method} "
                        f"lambda={format_float(bp.lam)}"
                    )
        for line in trailers:
            out.write(line + "\n")
    return status


# -- validate ----------------------------------------------------------------

# Si(pi), Si(2 pi), Si(10) to 17 digits
_SI_REFERENCE = ((math.pi, 1.8519370519824662), (2 * math.pi, 1.4181515761326284), (10.0, 1.6583475942188740))


def _group_cardinality():
    h = 0.4
    x = np.arange(-5, 6) * h
    vals = np.array([[core.cardinal(j, h, xi) for xi in x] for j in range(-5, 6)])
    return core.sinc(0.0) == 1.0 and np.max(np.abs(vals - np.eye(11))) < 1e-15


def _group_sigma():
    for x, ref in _SI_REFERENCE:
        if abs(core.sine_integral(x) - ref) > 1e-13:
            return False
    for k in range(1, 6):
        sigma, e = core.sigma_e(k)
        if abs(sigma - core.sine_integral(math.pi * k) / math.pi) > 1e-15:
            return False
        if abs(e + core.sigma_e(-k)[1] - 1.0) > 1e-15:
            return False
    return True


def _group_quadrature():
    iv = core.Interval(0.0, 1.0)
    beta = sinc_quadrature(lambda t, da, db: (da * db) ** -0.5, iv, 100, 0.5, complement=True)
    half = sinc_quadrature(lambda s: np.sqrt(s * (1.0 - s)), iv, 60, 0.5)
    split = singular_split_quadrature(0.5, 0.5, lambda s: np.ones_like(s), iv, 80, 0.5)
    return abs(beta - math.pi) <= 1e-8 and abs(half - math.pi / 8) <= 1e-7 and abs(split - 2 * math.sqrt(2)) <= 1e-8


def _group_eigen():
    grid = core.build_grid(core.Interval(0.0, 1.0), 10, 0.5)
    w = np.sqrt(core.se_map_deriv(grid.interval, np.arange(-10, 11) * grid.h))
    return all(np.all(eigendecompose(A, w).s.real > 0) for A in build_A_matrices(grid))


def _fd_relative_error(F, J, c, step=1e-7):
    c = np.asarray(c, dtype=float)
    Jan = J(c)
    cols = []
    for k in range(c.size):
        e = np.zeros_like(c)
        e[k] = step * max(1.0, abs(c[k]))
        cols.append((F(c + e) - F(c - e)) / (2 * e[k]))
    Jfd = np.column_stack(cols)
    return float(np.max(np.abs(Jan - Jfd)) / np.max(np.abs(Jan)))


def _group_jacobian():
    rng = np.random.default_rng(7)
    for n in (1, 2, 3, 4):
        bp = get_example(n, 0.5 if n == 4 else None)
        grid = core.build_grid(bp.problem.iv, 10, bp.alpha_recommended)
        col = CollocationSystem(bp.problem, grid)
        conv = ConvolutionSystem(bp.problem, build_operator_data(grid, bp.lam))
        for system, size in ((col, col.n), (conv, conv.z.size)):
            c = rng.uniform(0.1, 1.0, size)
            if _fd_relative_error(system.residual, system.jacobian, c) > 1e-6:
                return False
    return True


VALIDATION_GROUPS = {
    "cardinality": _group_cardinality,
    "sigma": _group_sigma,
    "quadrature": _group_quadrature,
    "eigen": _group_eigen,
    "jacobian": _group_jacobian,
}


def cmd_validate(args) -> int:
    results = {}
    core.sigma_e.cache_clear()
    for name, check in VALIDATION_GROUPS.items():
        try:
            results[name] = bool(check())
        except (SincError, ArithmeticError, ValueError) as exc:
            print(f"{name}: {type(exc).__name__}: {exc}", file=sys.stderr)
            results[name] = False
    core.sigma_e.cache_clear()
    with _open_output(args.output) as out:
        if args.format == "csv":
            out.write("group,status\n")
            for name, ok in results.items():
                out.write(f"{name},{'pass' if ok else 'fail'}\n")
        else:
            for name, ok in results.items():
                out.write(f"{name:<12} {'pass' if ok else 'FAIL'}\n")
    return EXIT_OK if all(results.values()) else EXIT_NUMERICAL


COMMANDS = {"solve": cmd_solve, "study": cmd_study, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help (0) and on bad arguments (1)
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"sincfred: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"sincfred: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"sincfred: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
