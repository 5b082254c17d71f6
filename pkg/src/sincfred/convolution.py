"""Sinc-convolution discretization.

The one-sided integrals int_a^t (t-s)^(-lam) v(s) ds and
int_t^b (s-t)^(-lam) v(s) ds are approximated by F(A1) v and F(A2) v,
where A1, A2 are the sinc indefinite-integration matrices and
F(s) = Gamma(1-lam) s^(1-lam) is the Laplace-type transform of t^(-lam).
F(A) is formed through an eigendecomposition of A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .approx import OmegaExpansion
from .core import SincGrid, build_grid, complex_principal_power, gamma_real, se_map_deriv, sigma_e
from .errors import DecompositionFailure, DomainError, ParameterError, ResidueError
from .newton import NewtonConfig, SolveReport, newton_solve
from .problem import WeaklySingularProblem

__all__ = [
    "Eigen",
    "ConvolutionOperatorData",
    "ConvolutionSolution",
    "build_Im1",
    "build_A_matrices",
    "eigendecompose",
    "flip",
    "laplace_F",
    "build_B",
    "build_operator_data",
    "residual_conv",
    "jacobian_conv",
    "solve_convolution",
]

RECONSTRUCTION_RTOL = 1e-8
RESIDUE_RTOL = 1e-8


def build_Im1(N: int) -> np.ndarray:
    """Toeplitz matrix [e_{i-j}] of order 2N+1."""
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    e = np.array([sigma_e(k)[1] for k in range(-2 * N, 2 * N + 1)])
    idx = np.arange(2 * N + 1)
    return e[idx[:, None] - idx[None, :] + 2 * N]


def build_A_matrices(grid: SincGrid) -> tuple[np.ndarray, np.ndarray]:
    Im1 = build_Im1(grid.N)
    x = np.arange(-grid.N, grid.N + 1) * grid.h
    D = se_map_deriv(grid.interval, x)
    return grid.h * Im1 * D[None, :], grid.h * Im1.T * D[None, :]


@dataclass(frozen=True)
class Eigen:
    s: np.ndarray
    X: np.ndarray
    Xinv: np.ndarray


def _canonical(s, X, Xinv) -> Eigen:
    order = np.lexsort((s.imag, s.real))
    s, X, Xinv = s[order], X[:, order], Xinv[order, :]
    cols = np.arange(X.shape[1])
    scale = X[np.argmax(np.abs(X), axis=0), cols]
    first = X[np.argmax(np.abs(X) > 0, axis=0), cols] / scale
    scale = np.where(first.real < 0, -scale, scale)
    return Eigen(s, X / scale[None, :], Xinv * scale[:, None])


def _check_reconstruction(A, eig: Eigen):
    scale = np.max(np.abs(A)) if A.size else 0.0
    rec = np.max(np.abs(A - (eig.X * eig.s[None, :]) @ eig.Xinv)) if A.size else 0.0
    if not np.isfinite(rec) or rec > RECONSTRUCTION_RTOL * scale:
        raise DecompositionFailure(
            f"reconstruction residual {rec:.3e} exceeds {RECONSTRUCTION_RTOL:g} * {scale:.3e}", rec
        )


def eigendecompose(A, balance=None) -> Eigen:
    """Diagonalize a real matrix, A = X diag(s) X^{-1}.

    ``balance`` is an optional positive vector w; the eigenproblem is then
    solved for diag(w) A diag(w)^{-1}, which for the sinc integration
    matrices (w = sqrt of the quadrature weights) is close to normal and
    has far better conditioned eigenvectors than A itself. Rows and
    columns are permuted by decreasing diagonal before the QR iteration.

    Eigenvalues are ordered by real part, then imaginary part; each
    eigenvector is scaled so its largest entry has modulus one and its
    first nonzero entry a nonnegative real part.
    """
    A = np.asarray(A, dtype=float)
    w = np.ones(A.shape[0]) if balance is None else np.asarray(balance, dtype=float)
    if np.any(~(w > 0)):
        raise ParameterError("balance weights must be positive")
    M = w[:, None] * A / w[None, :]
    # graded matrices keep their small eigenvalues accurate under QR only
    # when the grading runs downward, so order by decreasing diagonal
    perm = np.argsort(-np.abs(np.diag(M)), kind="stable")
    try:
        s, XP = np.linalg.eig(M[np.ix_(perm, perm)])
        XG = np.empty_like(XP)
        XG[perm, :] = XP
        XGinv = np.linalg.inv(XG)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(f"eigendecomposition failed: {exc}") from exc
    eig = _canonical(s.astype(complex), XG / w[:, None], XGinv * w[None, :])
    _check_reconstruction(A, eig)
    return eig


def flip(eig: Eigen) -> Eigen:
    """Decomposition of J A J (J the reversal permutation) from that of A."""
    return _canonical(eig.s, eig.X[::-1, :], eig.Xinv[:, ::-1])


def laplace_F(lam: float, s):
    """Gamma(1-lam) s^(1-lam), the transform of t^(-lam) with infinite upper limit."""
    if not 0 < lam < 1:
        raise ParameterError(f"lambda must lie in (0,1), got {lam}")
    return gamma_real(1.0 - lam) * complex_principal_power(s, 1.0 - lam)


def build_B(eig: Eigen, lam: float) -> np.ndarray:
    if np.any(eig.s.real <= 0):
        raise DomainError("matrix has eigenvalues outside the open right half-plane")
    F = laplace_F(lam, eig.s)
    B = (eig.X * F[None, :]) @ eig.Xinv
    scale = np.max(np.abs(B.real))
    residue = np.max(np.abs(B.imag))
    if residue > RESIDUE_RTOL * scale:
        raise ResidueError(f"imaginary residue {residue:.3e} exceeds {RESIDUE_RTOL:g} * {scale:.3e}", residue)
    return np.ascontiguousarray(B.real)


@dataclass(frozen=True)
class ConvolutionOperatorData:
    grid: SincGrid
    lam: float
    Im1: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    eig1: Eigen
    eig2: Eigen
    B1: np.ndarray
    B2: np.ndarray

    @property
    def B(self) -> np.ndarray:
        return self.B1 + self.B2


def build_operator_data(grid: SincGrid, lam: float) -> ConvolutionOperatorData:
    A1, A2 = build_A_matrices(grid)
    weights = se_map_deriv(grid.interval, np.arange(-grid.N, grid.N + 1) * grid.h)
    eig1 = eigendecompose(A1, balance=np.sqrt(weights))
    # the weights are symmetric in j and J Im1 J = Im1^T, so A2 = J A1 J
    eig2 = flip(eig1)
    _check_reconstruction(A2, eig2)
    B1, B2 = build_B(eig1, lam), build_B(eig2, lam)
    for M in (A1, A2, B1, B2):
        M.flags.writeable = False
    return ConvolutionOperatorData(grid, lam, build_Im1(grid.N), A1, A2, eig1, eig2, B1, B2)


class ConvolutionSystem:
    def __init__(self, problem: WeaklySingularProblem, data: ConvolutionOperatorData):
        self.problem = problem
        self.data = data
        self.z = data.grid.interior
        self.B = data.B
        self.g = problem.g(self.z)
        self._t = self.z[:, None]
        self._s = self.z[None, :]

    def residual(self, c):
        c = np.asarray(c, dtype=float)
        # row j integrates s -> kernel(z_j, s, u(s)), so each row has its own vector
        V = self.problem.kernel(self._t, self._s, c[None, :])
        return c - np.sum(self.B * V, axis=1) - self.g

    def jacobian(self, c):
        c = np.asarray(c, dtype=float)
        Vd = self.problem.kernel_du(self._t, self._s, c[None, :])
        return np.eye(c.size) - self.B * Vd


def residual_conv(p: WeaklySingularProblem, data: ConvolutionOperatorData, c) -> np.ndarray:
    return ConvolutionSystem(p, data).residual(c)


def jacobian_conv(p: WeaklySingularProblem, data: ConvolutionOperatorData, c) -> np.ndarray:
    return ConvolutionSystem(p, data).jacobian(c)


@dataclass(frozen=True)
class ConvolutionSolution:
    omega: OmegaExpansion
    newton_report: SolveReport

    def __call__(self, t):
        return self.omega(t)


def solve_convolution(
    p: WeaklySingularProblem,
    N: int,
    alpha: float | None = None,
    d: float = 3.14,
    newton_cfg: NewtonConfig | None = None,
    initial=None,
    data: ConvolutionOperatorData | None = None,
) -> ConvolutionSolution:
    """Solve the sinc-convolution system; the unknowns are u at the interior sinc points."""
    if N < 2:
        raise ParameterError(f"convolution needs N >= 2, got {N}")
    alpha = p.lam if alpha is None else alpha
    if data is None:
        data = build_operator_data(build_grid(p.iv, N, alpha, d), p.lam)
    system = ConvolutionSystem(p, data)
    seed = initial if initial is not None else p.rhs
    c0 = np.asarray(seed(system.z), dtype=float) * np.ones_like(system.z)
    c, report = newton_solve(system.residual, system.jacobian, c0, newton_cfg)
    return ConvolutionSolution(OmegaExpansion(data.grid, c), report)
