"""Exception hierarchy shared by every layer of the package."""


class ImspeError(Exception):
    """Base class for all errors raised by imspekit."""


class DomainError(ImspeError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class DuplicatePointError(ImspeError, ValueError):
    """Two design points coincide exactly, so the covariance matrix is singular."""


class SingularMatrixError(ImspeError, ArithmeticError):
    """Factorization failed or the matrix is too ill-conditioned for the working precision."""

    def __init__(self, message, cond=float("inf"), digits=None):
        super().__init__(message)
        self.cond = cond
        self.digits = digits


class NonConvergenceError(ImspeError, ArithmeticError):
    """A sequence did not show the contraction needed for extrapolation."""


class BoundsError(ImspeError, ArithmeticError):
    """An IMSPE value fell outside (0, 1)."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class BracketError(ImspeError, ValueError):
    """The initial grid of a scalar minimization did not bracket a minimum."""


class ConfigError(ImspeError, ValueError):
    """A run configuration is malformed or inconsistent."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
