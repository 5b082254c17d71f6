"""Sinc-collocation discretization of the weakly singular equation.

The approximate solution is

    u_N(t) = c_{-N-1} ((b-t)/(b-a))^lam + sum_j c_j S(j,h)(log((t-a)/(b-t)))
             + c_{N+1} ((t-a)/(b-a))^(1-lam)

and the equation is collocated at the 2N+3 sinc points with the integral
replaced by SE sinc quadrature on [a, t_i] and [t_i, b].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .approx import (
    EndpointExponents,
    SincExpansion,
    collocation_basis,
    interpolate_collocation,
    singular_split_quadrature,
    split_nodes,
)
from .core import SincGrid, build_grid
from .errors import ParameterError
from .newton import NewtonConfig, SolveReport, newton_solve
from .problem import WeaklySingularProblem

__all__ = [
    "CollocationSystem",
    "CollocationSolution",
    "apply_KN",
    "residual",
    "jacobian",
    "solve_collocation",
]


def apply_KN(p: WeaklySingularProblem, u_eval, grid: SincGrid, t: float) -> float:
    """Discrete integral operator at t, for an arbitrary function ``u_eval``."""
    return singular_split_quadrature(
        t, p.lam, lambda s: p.kernel(t, s, u_eval(s)), p.iv, grid.N, grid.alpha, grid.d
    )


class CollocationSystem:
    """Residual and Jacobian of the collocation equations on one grid.

    Quadrature nodes, weights and basis values at the nodes do not depend
    on the coefficients, so they are tabulated once here.
    """

    def __init__(self, problem: WeaklySingularProblem, grid: SincGrid):
        if grid.interval != problem.iv:
            raise ParameterError("grid and problem are on different intervals")
        self.problem = problem
        self.grid = grid
        self.exponents = EndpointExponents.for_lambda(problem.lam)
        iv = grid.interval
        n = 2 * grid.N + 3
        self.n = n
        self.E = collocation_basis(grid, self.exponents, grid.dist_a, grid.dist_b)
        q = 2 * (2 * grid.N + 1)
        W = np.empty((n, q))
        S = np.empty((n, q))
        Phi = np.empty((n, q, n))
        for i in range(n):
            nda, ndb, w = split_nodes(problem.lam, grid.N, grid.h, grid.dist_a[i], grid.dist_b[i], iv.length)
            W[i] = w
            S[i] = np.where(nda <= ndb, iv.a + nda, iv.b - ndb)
            Phi[i] = collocation_basis(grid, self.exponents, nda, ndb)
        self.W, self.S, self.Phi = W, S, Phi
        self.active = W > 0
        self.T = np.broadcast_to(grid.points[:, None], W.shape)
        self.g = problem.g(grid.points)

    def node_values(self, c):
        return self.Phi @ c

    def _kernel(self, f, c):
        vals = f(self.T, self.S, self.node_values(c))
        return np.where(self.active, vals, 0.0)

    def integral(self, c):
        """K_N u_N at every sinc point."""
        return np.sum(self.W * self._kernel(self.problem.kernel, c), axis=1)

    def residual(self, c):
        c = np.asarray(c, dtype=float)
        return self.E @ c - self.integral(c) - self.g

    def jacobian(self, c):
        c = np.asarray(c, dtype=float)
        kd = self.W * self._kernel(self.problem.kernel_du, c)
        return self.E - np.einsum("iq,iqm->im", kd, self.Phi)


def residual(p: WeaklySingularProblem, grid: SincGrid, c) -> np.ndarray:
    return CollocationSystem(p, grid).residual(c)


def jacobian(p: WeaklySingularProblem, grid: SincGrid, c) -> np.ndarray:
    return CollocationSystem(p, grid).jacobian(c)


@dataclass(frozen=True)
class CollocationSolution:
    expansion: SincExpansion
    newton_report: SolveReport

    def __call__(self, t):
        return self.expansion(t)


def solve_collocation(
    p: WeaklySingularProblem,
    N: int,
    alpha: float | None = None,
    d: float = 3.14,
    newton_cfg: NewtonConfig | None = None,
    initial=None,
) -> CollocationSolution:
    """Solve the collocation system by damped Newton.

    ``alpha`` defaults to lambda. ``initial`` may be a callable whose
    interpolant seeds Newton; the default seed is the interpolant of g.
    """
    if N < 2:
        raise ParameterError(f"collocation needs N >= 2, got {N}")
    alpha = p.lam if alpha is None else alpha
    grid = build_grid(p.iv, N, alpha, d)
    system = CollocationSystem(p, grid)
    seed = initial if initial is not None else p.rhs
    c0 = interpolate_collocation(lambda t: float(seed(t)), grid, system.exponents).coeffs
    c, report = newton_solve(system.residual, system.jacobian, c0, newton_cfg)
    return CollocationSolution(SincExpansion(grid, system.exponents, c), report)
