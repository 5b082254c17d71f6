"""Sinc functions, the single-exponential (SE) map and sinc point grids.

Also hosts the handful of special functions the schemes need: the sine
integral (for the indefinite-integration Toeplitz matrix), the real Gamma
function and the principal complex power.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import expit

from .errors import DomainError, ParameterError

__all__ = [
    "Interval",
    "SincGrid",
    "sinc",
    "cardinal",
    "se_map",
    "se_inv",
    "se_map_deriv",
    "step_size",
    "build_grid",
    "sine_integral",
    "sigma_e",
    "gamma_real",
    "complex_principal_power",
]

_TAYLOR_CUTOFF = 1e-4


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ParameterError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise ParameterError(f"interval requires a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a


def sinc(x):
    """Normalized sinc, sin(pi x)/(pi x), with sinc(0) = 1.

    Accepts scalars or arrays. Near the removable singularity a four-term
    Taylor expansion is used.
    """
    x = np.asarray(x, dtype=float)
    y = np.pi * x
    small = np.abs(y) < _TAYLOR_CUTOFF
    y_safe = np.where(small, 1.0, y)
    y2 = y * y
    taylor = 1.0 - y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0))
    out = np.where(small, taylor, np.sin(y_safe) / y_safe)
    return out[()] if out.ndim == 0 else out


def cardinal(j, h, x):
    """j-th sinc cardinal function S(j, h)(x) = sinc(x/h - j)."""
    if h <= 0:
        raise ParameterError(f"step size must be positive, got {h}")
    return sinc(np.asarray(x, dtype=float) / h - j)


def se_map(iv: Interval, x):
    """SE transform R -> (a, b): (b-a)/2 tanh(x/2) + (b+a)/2."""
    x = np.asarray(x, dtype=float)
    # measured from the nearer endpoint, so points close to a or b keep full
    # relative accuracy in t - a and b - t
    out = np.where(x < 0, iv.a + iv.length * expit(x), iv.b - iv.length * expit(-x))
    return out[()] if out.ndim == 0 else out


def se_inv(iv: Interval, t):
    """Inverse SE transform log((t-a)/(b-t)); only defined on the open interval."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= iv.a) or np.any(t >= iv.b):
        raise DomainError(f"se_inv requires a < t < b on [{iv.a}, {iv.b}]")
    out = np.log((t - iv.a) / (iv.b - t))
    return out[()] if out.ndim == 0 else out


def se_map_deriv(iv: Interval, x):
    """Derivative of se_map, (b-a) e^x / (1+e^x)^2, written overflow-free."""
    x = np.asarray(x, dtype=float)
    out = iv.length * expit(x) * expit(-x)
    return out[()] if out.ndim == 0 else out


def step_size(alpha: float, d: float, N: int) -> float:
    _check_params(N, alpha, d)
    return math.sqrt(math.pi * d / (alpha * N))


def _check_params(N, alpha, d):
    if int(N) != N or N < 1:
        raise ParameterError(f"N must be a positive integer, got {N}")
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0 < d < math.pi:
        raise ParameterError(f"d must lie in (0, pi), got {d}")


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SincGrid:
    """Sinc points t_{-N-1}, ..., t_{N+1} on an interval.

    ``points[k]`` is t_{k-N-1}; the endpoints are stored exactly. The
    distances to both endpoints are kept separately (``dist_a``,
    ``dist_b``) because points crowd the endpoints to within a few ulps
    and ``b - t`` computed by subtraction would lose all precision.
    """

    interval: Interval
    N: int
    d: float
    alpha: float
    h: float
    points: np.ndarray = field(repr=False)
    dist_a: np.ndarray = field(repr=False)
    dist_b: np.ndarray = field(repr=False)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N - 1, self.N + 2)

    @property
    def interior(self) -> np.ndarray:
        """The 2N+1 points phi(jh), |j| <= N."""
        return self.points[1:-1]

    def point(self, j: int) -> float:
        if abs(j) > self.N + 1:
            raise IndexError(f"sinc point index {j} outside [-{self.N + 1}, {self.N + 1}]")
        return float(self.points[j + self.N + 1])


def build_grid(iv: Interval, N: int, alpha: float = 1.0, d: float = 3.14) -> SincGrid:
    h = step_size(alpha, d, N)
    x = np.arange(-N, N + 1) * h
    L = iv.length
    da = np.concatenate(([0.0], L * expit(x), [L]))
    db = np.concatenate(([L], L * expit(-x), [0.0]))
    pts = np.concatenate(([iv.a], se_map(iv, x), [iv.b]))
    return SincGrid(iv, int(N), float(d), float(alpha), h, _frozen(pts), _frozen(da), _frozen(db))


# -- special functions -------------------------------------------------------

_SI_SERIES_MAX = 4.0
_EPS = np.finfo(float).eps


def _si_series(x):
    # sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    term = x
    total = x
    x2 = x * x
    k = 0
    while True:
        k += 1
        term *= -x2 / ((2 * k) * (2 * k + 1))
        contrib = term / (2 * k + 1)
        total += contrib
        if abs(contrib) <= _EPS * abs(total):
            return total


def _si_continued_fraction(x):
    # Modified Lentz evaluation of E1(ix); yields the auxiliary functions
    # f, g through E1(ix) = -Ci(x) + i (Si(x) - pi/2).
    tiny = 1e-300
    b = complex(1.0, x)
    c = 1.0 / tiny
    d = 1.0 / b
    hval = d
    for i in range(2, 10_000):
        a = -float((i - 1) ** 2)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        hval *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < _EPS:
            break
    else:  # pragma: no cover - the fraction converges for x >= 2 in tens of steps
        raise ArithmeticError("sine integral continued fraction did not converge")
    e1 = complex(math.cos(x), -math.sin(x)) * hval
    return math.pi / 2 + e1.imag


def sine_integral(x: float) -> float:
    """Si(x) = int_0^x sin(t)/t dt for x >= 0."""
    x = float(x)
    if x < 0 or math.isnan(x):
        raise DomainError(f"sine_integral requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.pi / 2
    if x <= _SI_SERIES_MAX:
        return _si_series(x)
    return _si_continued_fraction(x)


@lru_cache(maxsize=4096)
def sigma_e(k: int) -> tuple[float, float]:
    """Return (sigma_k, e_k) with sigma_k = int_0^k sinc and e_k = 1/2 + sigma_k."""
    k = int(k)
    if k == 0:
        return 0.0, 0.5
    sigma = math.copysign(sine_integral(math.pi * abs(k)) / math.pi, k)
    return sigma, 0.5 + sigma


def gamma_real(x: float) -> float:
    if not x > 0:
        raise DomainError(f"gamma_real requires x > 0, got {x}")
    return math.gamma(x)


def complex_principal_power(s, p: float):
    """s**p on the principal branch, for Re(s) > 0.

    Works elementwise on arrays as well as on Python scalars.
    """
    if np.ndim(s) == 0:
        s = complex(s)
        if not s.real > 0:
            raise DomainError(f"complex_principal_power requires Re(s) > 0, got {s}")
        return cmath.exp(p * cmath.log(s))
    s = np.asarray(s, dtype=complex)
    if np.any(~(s.real > 0)):
        raise DomainError("complex_principal_power requires Re(s) > 0 for every entry")
    return np.exp(p * np.log(s))
