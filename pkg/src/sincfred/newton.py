"""Damped Newton iteration for dense square systems.

The iteration is Newton with Armijo backtracking on ||F||^2. If the very
first Newton step from the initial guess fails its Armijo test, a short
steepest-descent phase on 0.5 ||F||^2 is run first and Newton restarts
from its best iterate.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NonConvergence, ParameterError, SingularJacobian

log = logging.getLogger(__name__)

__all__ = ["NewtonConfig", "SolveReport", "lu_solve", "steepest_descent_init", "newton_solve"]

PIVOT_RTOL = 1e-14


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-12
    max_newton_iters: int = 50
    descent_steps: int = 20
    armijo_c: float = 1e-4
    min_step: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0:
            raise ParameterError(f"tol must be positive, got {self.tol}")
        if self.max_newton_iters < 1:
            raise ParameterError(f"max_newton_iters must be >= 1, got {self.max_newton_iters}")
        if self.descent_steps < 0:
            raise ParameterError(f"descent_steps must be >= 0, got {self.descent_steps}")
        if not 0 < self.armijo_c < 1:
            raise ParameterError(f"armijo_c must lie in (0, 1), got {self.armijo_c}")


@dataclass
class SolveReport:
    iterations: int = 0
    final_residual: float = np.inf
    descent_iterations: int = 0
    converged: bool = False
    # max-norm residual after each Newton iterate, starting with the initial guess
    residual_history: list[float] = field(default_factory=list)
    step_lengths: list[float] = field(default_factory=list)


def lu_solve(A, b) -> np.ndarray:
    """Solve A x = b by row-pivoted LU.

    Raises SingularJacobian when a pivot falls below 1e-14 * max|A|.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise ParameterError(f"incompatible shapes {A.shape} and {b.shape}")
    scale = np.max(np.abs(A)) if A.size else 0.0
    if not np.all(np.isfinite(A)):
        raise SingularJacobian("matrix has non-finite entries")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularJacobian
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    smallest = float(pivots.min()) if pivots.size else 0.0
    if scale == 0.0 or smallest < PIVOT_RTOL * scale:
        raise SingularJacobian(f"pivot {smallest:.3e} below {PIVOT_RTOL:g} * {scale:.3e}", smallest, scale)
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def _merit(r):
    return 0.5 * float(np.dot(r, r))


def steepest_descent_init(F, J, c0, steps: int, *, return_count: bool = False):
    """Gradient descent on 0.5 ||F||^2 with step halving.

    Returns the iterate with the smallest merit seen, so never a point
    worse than ``c0``.
    """
    c = np.array(c0, dtype=float)
    r = np.asarray(F(c), dtype=float)
    phi = _merit(r)
    best, best_phi = c.copy(), phi
    taken = 0
    step = 1.0
    for _ in range(steps):
        grad = np.asarray(J(c), dtype=float).T @ r
        gg = float(np.dot(grad, grad))
        if gg == 0.0 or phi == 0.0:
            break
        # start from the Gauss-Newton-scaled step along -grad, then halve
        jg = np.asarray(J(c), dtype=float) @ grad
        jgjg = float(np.dot(jg, jg))
        step = (gg / jgjg) if jgjg > 0 else step
        while step > 1e-16:
            trial = c - step * grad
            rt = np.asarray(F(trial), dtype=float)
            pt = _merit(rt)
            if np.isfinite(pt) and pt < phi:
                break
            step *= 0.5
        else:
            break
        c, r, phi = trial, rt, pt
        taken += 1
        if phi < best_phi:
            best, best_phi = c.copy(), phi
    return (best, taken) if return_count else best


def newton_solve(F, J, c0, cfg: NewtonConfig | None = None):
    """Solve F(c) = 0 starting from c0.

    Returns ``(c, report)``. Raises NonConvergence (carrying the best
    iterate and the report) if the iteration budget is exhausted or the
    line search stalls, and SingularJacobian if a linear solve fails.
    """
    cfg = cfg or NewtonConfig()
    report = SolveReport()
    c = np.array(c0, dtype=float)
    r = np.asarray(F(c), dtype=float)
    rnorm = float(np.max(np.abs(r))) if r.size else 0.0
    report.residual_history.append(rnorm)
    best_c, best_norm = c.copy(), rnorm
    first = True

    while rnorm > cfg.tol:
        if report.iterations >= cfg.max_newton_iters:
            report.final_residual = best_norm
            raise NonConvergence(
                f"Newton did not reach tol={cfg.tol:g} in {cfg.max_newton_iters} iterations "
                f"(best residual {best_norm:.3e})",
                best_c,
                report,
            )
        delta = lu_solve(J(c), -r)
        phi = float(np.dot(r, r))

        def accepted(rt, step):
            pt = float(np.dot(rt, rt))
            return np.isfinite(pt) and pt <= (1.0 - 2.0 * cfg.armijo_c * step) * phi

        if first and cfg.descent_steps > 0 and not accepted(np.asarray(F(c + delta), dtype=float), 1.0):
            # full step from the initial guess rejected: seed by steepest descent
            first = False
            c, taken = steepest_descent_init(F, J, c, cfg.descent_steps, return_count=True)
            report.descent_iterations = taken
            log.debug("steepest descent seeding took %d steps", taken)
            r = np.asarray(F(c), dtype=float)
            rnorm = float(np.max(np.abs(r)))
            if rnorm < best_norm:
                best_c, best_norm = c.copy(), rnorm
            continue
        step = 1.0
        while True:
            trial = c + step * delta
            rt = np.asarray(F(trial), dtype=float)
            if accepted(rt, step):
                break
            step *= 0.5
            if step < cfg.min_step:
                report.final_residual = best_norm
                raise NonConvergence(f"line search stalled at residual {rnorm:.3e}", best_c, report)
        first = False
        c, r = trial, rt
        rnorm = float(np.max(np.abs(r)))
        report.iterations += 1
        report.step_lengths.append(step)
        report.residual_history.append(rnorm)
        if rnorm < best_norm:
            best_c, best_norm = c.copy(), rnorm

    report.final_residual = rnorm
    report.converged = True
    return c, report
