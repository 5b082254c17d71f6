"""Sinc interpolation bases and SE sinc quadrature.

Two bases live here:

* the collocation basis: sinc functions in the SE variable plus two
  boundary functions ((b-t)/(b-a))**left and ((t-a)/(b-a))**right;
* the omega basis used by the convolution scheme, where the outermost
  sinc functions are replaced by endpoint-corrected combinations so that
  the expansion takes its first/last coefficient at a/b.

Everything that evaluates near the endpoints works from the pair of
distances (t - a, b - t) rather than from t itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import Interval, SincGrid, se_map, se_map_deriv, sinc, step_size
from .errors import DomainError, ParameterError

__all__ = [
    "EndpointExponents",
    "SincExpansion",
    "OmegaExpansion",
    "lebesgue_bound",
    "collocation_basis",
    "interpolate_collocation",
    "eval_expansion",
    "omega_matrix",
    "omega_basis",
    "sinc_quadrature",
    "split_nodes",
    "singular_split_quadrature",
]


@dataclass(frozen=True)
class EndpointExponents:
    left: float
    right: float

    def __post_init__(self):
        for name in ("left", "right"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ParameterError(f"endpoint exponent {name} must lie in (0, 1], got {v}")

    @classmethod
    def for_lambda(cls, lam: float) -> EndpointExponents:
        """Exponents (lambda, 1 - lambda) used by the collocation scheme."""
        return cls(lam, 1.0 - lam)


def lebesgue_bound(N: int) -> float:
    """Upper bound (2/pi)(3 + log N) on the sinc Lebesgue constant."""
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    return 2.0 / math.pi * (3.0 + math.log(N))


def _distances(iv: Interval, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < iv.a) or np.any(t > iv.b):
        raise DomainError(f"evaluation point outside [{iv.a}, {iv.b}]")
    return t - iv.a, iv.b - t


def _sinc_block(grid: SincGrid, da, db):
    """Matrix of S(j,h)(log(da/db)) for j = -N..N; zero where da or db vanishes."""
    inside = (da > 0) & (db > 0)
    x = np.log(np.where(inside, da, 1.0) / np.where(inside, db, 1.0))
    j = np.arange(-grid.N, grid.N + 1)
    block = sinc(x[:, None] / grid.h - j[None, :])
    block[~inside, :] = 0.0
    return block


def collocation_basis(grid: SincGrid, exps: EndpointExponents, da, db) -> np.ndarray:
    """Evaluate the 2N+3 collocation basis functions at points given by distances.

    Column order follows the coefficient order c_{-N-1}, ..., c_{N+1}.
    """
    da = np.asarray(da, dtype=float)
    db = np.asarray(db, dtype=float)
    L = grid.interval.length
    out = np.empty((da.size, 2 * grid.N + 3))
    out[:, 0] = (db / L) ** exps.left
    out[:, -1] = (da / L) ** exps.right
    out[:, 1:-1] = _sinc_block(grid, da, db)
    return out


@dataclass(frozen=True)
class SincExpansion:
    grid: SincGrid
    exponents: EndpointExponents
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (2 * self.grid.N + 3,):
            raise ParameterError(f"expected {2 * self.grid.N + 3} coefficients, got {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def __call__(self, t):
        return eval_expansion(self, t)


def eval_expansion(e: SincExpansion, t):
    """Evaluate a collocation expansion on [a, b]; endpoints use the stored coefficients."""
    scalar = np.ndim(t) == 0
    da, db = _distances(e.grid.interval, t)
    vals = collocation_basis(e.grid, e.exponents, da, db) @ e.coeffs
    return float(vals[0]) if scalar else vals


def interpolate_collocation(f, grid: SincGrid, exps: EndpointExponents) -> SincExpansion:
    """Collocation interpolant of f: boundary part fixed by f(a), f(b), sinc part by the residual."""
    pts = grid.points
    fv = np.array([float(f(t)) for t in pts])
    L = grid.interval.length
    c = np.empty_like(fv)
    c[0], c[-1] = fv[0], fv[-1]
    interior = slice(1, -1)
    boundary = fv[0] * (grid.dist_b[interior] / L) ** exps.left + fv[-1] * (grid.dist_a[interior] / L) ** exps.right
    c[interior] = fv[interior] - boundary
    return SincExpansion(grid, exps, c)


# -- omega basis -----------------------------------------------------------------


def omega_matrix(grid: SincGrid, da, db) -> np.ndarray:
    """Values of omega_{-N}, ..., omega_N at points given by endpoint distances."""
    da = np.asarray(da, dtype=float)
    db = np.asarray(db, dtype=float)
    L = grid.interval.length
    gam = _sinc_block(grid, da, db)
    jh = np.arange(-grid.N, grid.N + 1) * grid.h
    out = gam.copy()
    # 1/(1+e^{jh}) and e^{jh}/(1+e^{jh}) are the SE-point values of the linear terms
    out[:, 0] = db / L - gam[:, 1:] @ expit(-jh[1:])
    out[:, -1] = da / L - gam[:, :-1] @ expit(jh[:-1])
    return out


def omega_basis(j: int, grid: SincGrid, t):
    if abs(j) > grid.N:
        raise IndexError(f"omega index {j} outside [-{grid.N}, {grid.N}]")
    scalar = np.ndim(t) == 0
    da, db = _distances(grid.interval, t)
    col = omega_matrix(grid, da, db)[:, j + grid.N]
    return float(col[0]) if scalar else col


@dataclass(frozen=True)
class OmegaExpansion:
    grid: SincGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (2 * self.grid.N + 1,):
            raise ParameterError(f"expected {2 * self.grid.N + 1} coefficients, got {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        da, db = _distances(self.grid.interval, t)
        vals = omega_matrix(self.grid, da, db) @ self.coeffs
        return float(vals[0]) if scalar else vals


# -- quadrature ------------------------------------------------------------------


def sinc_quadrature(f, iv: Interval, N: int, alpha: float = 1.0, d: float = 3.14, *, complement: bool = False) -> float:
    """SE sinc quadrature h * sum f(phi(jh)) phi'(jh) over j = -N..N.

    Exponential convergence needs f * (t-a)(b-t) to decay like Q**alpha at
    the endpoints; that is the caller's responsibility.

    With ``complement=True`` f is called as ``f(t, t - a, b - t)`` where
    the two distances are computed without cancellation. Integrands with
    endpoint singularities need this once nodes crowd an endpoint closer
    than one ulp of t.
    """
    h = step_size(alpha, d, N)
    x = np.arange(-N, N + 1) * h
    t = se_map(iv, x)
    w = h * se_map_deriv(iv, x)
    if complement:
        da, db = iv.length * expit(x), iv.length * expit(-x)
        fv = np.array([float(f(*args)) for args in zip(t, da, db)])
        return float(np.sum(fv * w))
    # nodes that round onto an endpoint are skipped: under the decay
    # assumption weight*value there is below double resolution
    inside = (t > iv.a) & (t < iv.b)
    fv = np.array([float(f(s)) for s in t[inside]])
    return float(np.sum(fv * w[inside]))


def split_nodes(lam: float, N: int, h: float, da_t: float, db_t: float, L: float):
    """Nodes and weights of the split weakly singular rule at one point t.

    Returns ``(node_da, node_db, weights)``: endpoint distances of the
    2(2N+1) nodes (left subinterval first) and the weights absorbing
    |t - s|**(-lam) and the SE Jacobian. A subinterval of zero length
    contributes nodes with zero weight.
    """
    x = np.arange(-N, N + 1) * h
    p, m = expit(x), expit(-x)
    ep = np.exp(np.minimum(x, 700.0))
    em = np.exp(np.minimum(-x, 700.0))
    # left piece [a, t]: s - a = da_t * p, t - s = da_t * m
    wl = h * da_t ** (1.0 - lam) * (1.0 + ep) ** (lam - 1.0) / (1.0 + em)
    # right piece [t, b]: s - t = db_t * p, b - s = db_t * m
    wr = h * db_t ** (1.0 - lam) * (1.0 + em) ** (lam - 1.0) / (1.0 + ep)
    node_da = np.concatenate((da_t * p, da_t + db_t * p))
    node_db = np.concatenate((db_t + da_t * m, db_t * m))
    return node_da, node_db, np.concatenate((wl, wr))


def singular_split_quadrature(t: float, w: float, smooth, iv: Interval, N: int, alpha: float = 1.0, d: float = 3.14) -> float:
    """Approximate int_a^b |t - s|**(-w) smooth(s) ds by SE sinc quadrature on [a,t] and [t,b].

    ``smooth`` is called with an array of nodes. At t = a or t = b only
    the nonempty half contributes.
    """
    if not 0 < w < 1:
        raise ParameterError(f"singularity exponent must lie in (0, 1), got {w}")
    if not iv.a <= t <= iv.b:
        raise DomainError(f"t = {t} outside [{iv.a}, {iv.b}]")
    h = step_size(alpha, d, N)
    nda, ndb, wts = split_nodes(w, N, h, t - iv.a, iv.b - t, iv.length)
    s = np.where(nda <= ndb, iv.a + nda, iv.b - ndb)
    keep = wts > 0
    vals = np.broadcast_to(np.asarray(smooth(s[keep]), dtype=float), s[keep].shape)
    return float(np.dot(wts[keep], vals))

