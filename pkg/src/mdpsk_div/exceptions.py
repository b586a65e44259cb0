"""Exception hierarchy shared by the library and the command-line tool."""


class NumericalError(ArithmeticError):
    """Base class for numerical failures (CLI exit code 3)."""


class DomainError(NumericalError, ValueError):
    """An argument lies outside the range an evaluator supports."""


class DegenerateSpectrumError(NumericalError):
    """Two branches share the same lambda, so the partial-fraction weights have a pole.

    Jitter one branch SNR by a relative 1e-6 to move off the pole.
    """


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class ConfigError(ValueError):
    """Invalid run configuration (CLI exit code 2)."""
