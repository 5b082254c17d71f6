"""Exception hierarchy shared by the solvers and the CLI."""


class SincError(Exception):
    """Base class for all errors raised by sincfred."""


class DomainError(SincError, ValueError):
    """An argument lies outside the domain of a function."""


class ParameterError(SincError, ValueError):
    """A discretization or solver parameter is out of range."""


class NumericalFailure(SincError):
    """Base class for failures that map to exit code 2 in the CLI."""


class NonConvergence(NumericalFailure):
    """Newton iteration exhausted its budget.

    ``x`` holds the best iterate seen and ``report`` the solver report.
    """

    def __init__(self, message, x=None, report=None):
        super().__init__(message)
        self.x = x
        self.report = report


class SingularJacobian(NumericalFailure):
    def __init__(self, message, pivot=None, scale=None):
        super().__init__(message)
        self.pivot = pivot
        self.scale = scale


class DecompositionFailure(NumericalFailure):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResidueError(NumericalFailure):
    """Imaginary part of a matrix function of a real matrix is not negligible."""

    def __init__(self, message, residue=None):
        super().__init__(message)
        self.residue = residue


class AccuracyNotReached(NumericalFailure):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
