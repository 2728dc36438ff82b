"""Exception types shared across the package."""


class DistmulError(Exception):
    """Base class for all package errors."""


class NumericalError(DistmulError):
    """A quadrature or extrapolation step failed to reach its tolerance.

    ``estimate`` and ``error`` carry whatever partial result was available.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UnsupportedOrder(DistmulError, ValueError):
    """A derivative order or mollifier order outside the supported range."""


class UsageError(DistmulError, ValueError):
    """Inconsistent inputs (dimension mismatch, bad grammar, bad flags)."""
