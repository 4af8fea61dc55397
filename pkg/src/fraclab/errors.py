"""Exception types shared across the package."""


class FracLabError(Exception):
    """Base class for all package errors."""


class ParameterError(FracLabError, ValueError):
    """An argument is outside its admissible range."""


class SingularityError(FracLabError, ValueError):
    """Evaluation requested at a singular point (e.g. the kernel at 0)."""


class DomainError(FracLabError, ValueError):
    """A point or domain violates an operation's geometric precondition."""


class UnsupportedVariantError(DomainError):
    """The domain variant does not support the requested operation."""


class DivergenceError(FracLabError, ValueError):
    """A far-field integral diverges for the declared growth."""


class InsufficientDataError(FracLabError, ValueError):
    """Too few usable samples to fit."""


class ReliabilityError(FracLabError, RuntimeError):
    """A Monte Carlo run failed its own reliability checks."""


class ToleranceWarning(UserWarning):
    """Quadrature failed to meet its target tolerance; the reported
    err_estimate reflects the achieved accuracy."""
