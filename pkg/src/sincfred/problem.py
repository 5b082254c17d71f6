"""Problem data for u(t) - int_a^b |t-s|^(-lam) k(t, s, u(s)) ds = g(t)."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .core import Interval
from .errors import ParameterError

__all__ = ["WeaklySingularProblem", "hammerstein"]


@dataclass(frozen=True)
class WeaklySingularProblem:
    """A weakly singular Urysohn equation.

    ``kernel(t, s, u)`` is the regular part of the integrand (for a
    Hammerstein equation, k(t, s) * psi(s, u)); ``kernel_du`` is its
    partial derivative in u. Both, and ``rhs``, must broadcast over numpy
    arrays.
    """

    iv: Interval
    lam: float
    kernel: Callable
    kernel_du: Callable
    rhs: Callable
    name: str = ""

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ParameterError(f"lambda must lie in (0,1), got {self.lam}")

    def g(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self.rhs(t), dtype=float), t.shape)


def hammerstein(k, psi, dpsi):
    """Build (kernel, kernel_du) from k(t, s), psi(s, u) and d psi/du."""

    def kernel(t, s, u):
        return k(t, s) * psi(s, u)

    def kernel_du(t, s, u):
        return k(t, s) * dpsi(s, u)

    return kernel, kernel_du
