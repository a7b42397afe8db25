"""Shared exception types."""


class GKWError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GKWError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class TruncationError(GKWError, RuntimeError):
    """A window or term cap was hit before the requested mass/tolerance.

    Carries the mass (or accuracy) actually achieved so callers can decide
    whether to proceed anyway.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class PrecisionError(GKWError, RuntimeError):
    """A derived quantity is smaller than the error of its inputs."""


class ConvergenceError(GKWError, RuntimeError):
    """An iteration failed to converge within its cap."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConsistencyError(GKWError, RuntimeError):
    """Two independent evaluation routes disagree beyond their combined bounds."""
