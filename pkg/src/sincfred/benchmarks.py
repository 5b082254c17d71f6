"""Benchmark problems with known solutions, a reference quadrature and convergence studies.

The reference quadrature is independent of the sinc machinery: it removes
the |t - s|^(-w) singularity by the substitution t - s = tau^(1/(1-w))
(and its mirror image) and hands the now regular integrals to QUADPACK.
"""

from __future__ import annotations

import math
import threading
import time
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .collocation import solve_collocation
from .convolution import solve_convolution
from .core import Interval
from .errors import AccuracyNotReached, ParameterError, SincError
from .newton import NewtonConfig
from .problem import WeaklySingularProblem, hammerstein

__all__ = [
    "BenchmarkProblem",
    "ErrorReport",
    "RateFit",
    "oracle_singular_quadrature",
    "OracleRHS",
    "example1",
    "example2",
    "example3",
    "example4",
    "get_example",
    "continuous_residual",
    "sup_error",
    "fit_rate",
    "solve",
    "convergence_study",
    "run_one",
    "evaluation_points",
    "rate_threshold",
]

ORACLE_TOL = 1e-12
METHODS = ("collocation", "convolution")


def _half(smooth, t, w, length, sign):
    if length <= 0:
        return 0.0, 0.0
    p = 1.0 / (1.0 - w)
    top = length ** (1.0 - w)

    def f(tau):
        return float(smooth(t + sign * min(tau**p, length)))

    # the substitution leaves the integrand with a tau^(p-1) factor-free,
    # but smooth may still be non-analytic at the far endpoint
    with warnings.catch_warnings():
        # the returned error estimate is checked by the caller instead
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, 0.0, top, epsabs=1e-14, epsrel=1e-14, limit=400)
    return p * val, p * err


def oracle_singular_quadrature(t: float, w: float, smooth: Callable, iv: Interval) -> float:
    """Reference value of int_a^b |t - s|^(-w) smooth(s) ds.

    Raises AccuracyNotReached if QUADPACK's error estimate exceeds 1e-12.
    """
    if not 0 < w < 1:
        raise ParameterError(f"singularity exponent must lie in (0, 1), got {w}")
    if not iv.a <= t <= iv.b:
        raise ParameterError(f"t = {t} outside [{iv.a}, {iv.b}]")
    left, el = _half(smooth, t, w, t - iv.a, -1.0)
    right, er = _half(smooth, t, w, iv.b - t, +1.0)
    if el + er > ORACLE_TOL:
        raise AccuracyNotReached(f"oracle error estimate {el + er:.2e} at t={t}", el + er)
    return left + right


class OracleRHS:
    """g(t) = u(t) - int |t-s|^(-lam) k(t, s, u(s)) ds, evaluated by the oracle and memoized.

    Safe to call from several threads; each distinct t is computed once
    per thread that misses the cache.
    """

    def __init__(self, exact, kernel, lam, iv):
        self.exact = exact
        self.kernel = kernel
        self.lam = lam
        self.iv = iv
        self._cache: dict[float, float] = {}
        self._lock = threading.Lock()

    def _one(self, t: float) -> float:
        with self._lock:
            hit = self._cache.get(t)
        if hit is not None:
            return hit
        integral = oracle_singular_quadrature(t, self.lam, lambda s: self.kernel(t, s, self.exact(s)), self.iv)
        val = float(self.exact(t)) - integral
        with self._lock:
            self._cache[t] = val
        return val

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.array([self._one(float(x)) for x in arr.ravel()]).reshape(arr.shape)
        return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class BenchmarkProblem:
    problem: WeaklySingularProblem
    exact: Callable
    name: str
    alpha_recommended: float
    # starting guess for Newton; the equations have more than one solution
    initial: Callable | None = None

    @property
    def lam(self) -> float:
        return self.problem.lam


UNIT = Interval(0.0, 1.0)
_square = hammerstein(lambda t, s: 1.0, lambda s, u: u * u, lambda s, u: 2.0 * u)


def _g1(t):
    t = np.asarray(t, dtype=float)
    r = 1.0 - t
    return (
        np.sqrt(t * r)
        + 16.0 / 15.0 * t**2.5
        + 2.0 * t**2 * np.sqrt(r)
        + 4.0 / 3.0 * t * r**1.5
        + 2.0 / 5.0 * r**2.5
        - 4.0 / 3.0 * t**1.5
        - 2.0 * t * np.sqrt(r)
        - 2.0 / 3.0 * r**1.5
    )


def _exact1(t):
    t = np.asarray(t, dtype=float)
    return np.sqrt(t * (1.0 - t))


def example1() -> BenchmarkProblem:
    """u - int |t-s|^(-1/2) u^2 = g with u = sqrt(t(1-t)); g in closed form."""
    kernel, kernel_du = _square
    for t in (0.1, 0.37, 0.5, 0.9):
        ref = float(_exact1(t)) - oracle_singular_quadrature(t, 0.5, lambda s: s * (1.0 - s), UNIT)
        if abs(ref - float(_g1(t))) > 1e-8:
            raise AssertionError(f"closed-form g of example 1 disagrees with the oracle at t={t}")
    p = WeaklySingularProblem(UNIT, 0.5, kernel, kernel_du, _g1, name="example1")
    return BenchmarkProblem(p, _exact1, "example1", 0.5, initial=_hump)


def _hump(t):
    t = np.asarray(t, dtype=float)
    return 2.0 * t * (1.0 - t)


def example2() -> BenchmarkProblem:
    """u - int |t-s|^(-1/4) u^2 = g with u = t^(3/2)."""
    kernel, kernel_du = _square

    def exact(t):
        return np.asarray(t, dtype=float) ** 1.5

    rhs = OracleRHS(exact, kernel, 0.25, UNIT)
    p = WeaklySingularProblem(UNIT, 0.25, kernel, kernel_du, rhs, name="example2")
    return BenchmarkProblem(p, exact, "example2", 0.75, initial=_ramp)


def _ramp(t):
    return np.asarray(t, dtype=float)


def example3() -> BenchmarkProblem:
    """Urysohn form: u - int |t-s|^(-1/2) cos(s + u) = g with u = cos t."""

    def kernel(t, s, u):
        return np.cos(s + u)

    def kernel_du(t, s, u):
        return -np.sin(s + u)

    rhs = OracleRHS(np.cos, kernel, 0.5, UNIT)
    p = WeaklySingularProblem(UNIT, 0.5, kernel, kernel_du, rhs, name="example3")
    return BenchmarkProblem(p, np.cos, "example3", 0.5)


def example4(lam: float) -> BenchmarkProblem:
    """u - int |t-s|^(-lam) u^2 = g with u = t^(2 - lam)."""
    if not 0 < lam < 1:
        raise ParameterError(f"lambda must lie in (0,1), got {lam}")
    kernel, kernel_du = _square
    power = 2.0 - lam

    def exact(t):
        return np.asarray(t, dtype=float) ** power

    rhs = OracleRHS(exact, kernel, lam, UNIT)
    p = WeaklySingularProblem(UNIT, lam, kernel, kernel_du, rhs, name=f"example4(lambda={lam:g})")
    return BenchmarkProblem(p, exact, "example4", 1.0 - lam, initial=_parabola)


def _parabola(t):
    t = np.asarray(t, dtype=float)
    return t * t


def get_example(number: int, lam: float | None = None) -> BenchmarkProblem:
    if number == 1:
        return example1()
    if number == 2:
        return example2()
    if number == 3:
        return example3()
    if number == 4:
        if lam is None:
            raise ParameterError("example 4 needs lambda")
        return example4(lam)
    raise ParameterError(f"unknown example {number}; choose 1-4")


def continuous_residual(bp: BenchmarkProblem, t: float) -> float:
    """Residual of the exact solution in the continuous equation at t, via the oracle."""
    p = bp.problem
    integral = oracle_singular_quadrature(t, p.lam, lambda s: p.kernel(t, s, bp.exact(s)), p.iv)
    return float(bp.exact(t)) - integral - float(p.g(t))


# -- measurement -------------------------------------------------------------


def evaluation_points(iv: Interval, M: int) -> np.ndarray:
    if M < 2:
        raise ParameterError(f"M must be >= 2, got {M}")
    delta = iv.length / (10 * M)
    return np.concatenate(([iv.a], np.linspace(iv.a + delta, iv.b - delta, M), [iv.b]))


def sup_error(sol_eval, exact, iv: Interval, M: int = 1001) -> float:
    """Max |sol_eval - exact| on M inset uniform points plus both endpoints."""
    t = evaluation_points(iv, M)
    return float(np.max(np.abs(np.asarray(sol_eval(t)) - np.asarray(exact(t)))))


@dataclass
class ErrorReport:
    method: str
    example: str
    lam: float
    N: int
    sup_error: float | None
    iterations: int | None
    runtime_ms: float
    grid_size: int = 1001
    final_residual: float | None = None
    failure: str | None = None


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


def fit_rate(Ns: Sequence[int], errors: Sequence[float]) -> RateFit:
    """Least squares fit log(err) = intercept - slope * sqrt(N)."""
    x = np.sqrt(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    if x.size < 4:
        raise ParameterError("a rate fit needs at least 4 points")
    A = np.column_stack((np.ones_like(x), x))
    (c0, c1), *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_res = float(np.sum((y - A @ np.array([c0, c1])) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(-float(c1), float(c0), r2)


def solve(bp: BenchmarkProblem, method: str, N: int, alpha: float | None = None, d: float = 3.14,
          cfg: NewtonConfig | None = None, initial=None):
    alpha = bp.alpha_recommended if alpha is None else alpha
    initial = bp.initial if initial is None else initial
    if method == "collocation":
        return solve_collocation(bp.problem, N, alpha, d, cfg, initial=initial)
    if method == "convolution":
        return solve_convolution(bp.problem, N, alpha, d, cfg, initial=initial)
    raise ParameterError(f"unknown method {method!r}")


def run_one(bp: BenchmarkProblem, method: str, N: int, alpha=None, d=3.14, cfg=None, M: int = 1001,
            initial=None) -> ErrorReport:
    """Solve once and measure; numerical failures are recorded, not raised."""
    t0 = time.perf_counter()
    try:
        sol = solve(bp, method, N, alpha, d, cfg, initial)
    except SincError as exc:
        ms = 1e3 * (time.perf_counter() - t0)
        return ErrorReport(method, bp.name, bp.lam, N, None, None, ms, M, failure=f"{type(exc).__name__}: {exc}")
    ms = 1e3 * (time.perf_counter() - t0)
    err = sup_error(sol, bp.exact, bp.problem.iv, M)
    rep = sol.newton_report
    return ErrorReport(method, bp.name, bp.lam, N, err, rep.iterations, ms, M, rep.final_residual)


def convergence_study(bp: BenchmarkProblem, method: str, Ns: Sequence[int], alpha=None, d=3.14,
                      cfg=None, M: int = 1001, executor=None):
    """Solve for every N and fit the sqrt(N) rate law.

    Returns ``(reports, fit)``; ``fit`` is None when fewer than four
    solves succeeded. ``executor`` (a concurrent.futures executor) runs
    the solves concurrently; reports keep the order of ``Ns``.
    """
    Ns = list(Ns)
    if len(Ns) < 4 or Ns != sorted(Ns):
        raise ParameterError("Ns must be ascending with at least 4 entries")
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}")
    if executor is None:
        reports = [run_one(bp, method, N, alpha, d, cfg, M) for N in Ns]
    else:
        reports = list(executor.map(lambda N: run_one(bp, method, N, alpha, d, cfg, M), Ns))
    ok = [r for r in reports if r.sup_error is not None and r.sup_error > 0]
    fit = fit_rate([r.N for r in ok], [r.sup_error for r in ok]) if len(ok) >= 4 else None
    return reports, fit


def rate_threshold(lam: float, d: float = 3.14, safety: float = 0.7) -> float:
    return safety * math.sqrt(math.pi * d * lam)
