"""Sinc-collocation and sinc-convolution solvers for nonlinear weakly singular
Fredholm equations

    u(t) - int_a^b |t - s|^(-lam) k(t, s, u(s)) ds = g(t),   0 < lam < 1.
"""

from .approx import (
    EndpointExponents,
    OmegaExpansion,
    SincExpansion,
    interpolate_collocation,
    omega_basis,
    sinc_quadrature,
    singular_split_quadrature,
)
from .benchmarks import (
    BenchmarkProblem,
    ErrorReport,
    RateFit,
    convergence_study,
    fit_rate,
    get_example,
    oracle_singular_quadrature,
    run_one,
    sup_error,
)
from .collocation import CollocationSolution, solve_collocation
from .convolution import ConvolutionSolution, build_operator_data, solve_convolution
from .core import Interval, SincGrid, build_grid, sinc, sine_integral, step_size
from .errors import (
    AccuracyNotReached,
    DecompositionFailure,
    DomainError,
    NonConvergence,
    NumericalFailure,
    ParameterError,
    ResidueError,
    SincError,
    SingularJacobian,
)
from .newton import NewtonConfig, SolveReport, newton_solve
from .problem import WeaklySingularProblem, hammerstein

__version__ = "0.1.0"

__all__ = [
    "AccuracyNotReached",
    "BenchmarkProblem",
    "CollocationSolution",
    "ConvolutionSolution",
    "DecompositionFailure",
    "DomainError",
    "EndpointExponents",
    "ErrorReport",
    "Interval",
    "NewtonConfig",
    "NonConvergence",
    "NumericalFailure",
    "OmegaExpansion",
    "ParameterError",
    "RateFit",
    "ResidueError",
    "SincError",
    "SincExpansion",
    "SincGrid",
    "SingularJacobian",
    "SolveReport",
    "WeaklySingularProblem",
    "build_grid",
    "build_operator_data",
    "convergence_study",
    "fit_rate",
    "get_example",
    "hammerstein",
    "interpolate_collocation",
    "newton_solve",
    "omega_basis",
    "oracle_singular_quadrature",
    "run_one",
    "sinc",
    "sinc_quadrature",
    "sine_integral",
    "singular_split_quadrature",
    "solve_collocation",
    "solve_convolution",
    "step_size",
    "sup_error",
]
