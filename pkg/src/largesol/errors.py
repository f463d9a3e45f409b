"""Exception types shared across the package."""


class LargeSolError(Exception):
    """Base class for all package errors."""


class DomainError(LargeSolError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class DivergenceError(LargeSolError):
    """The Keller-Osserman integral diverges, so the requested object does not exist."""


class SolverError(LargeSolError, RuntimeError):
    """A nonlinear solve failed.

    The last Newton iterate is kept on ``last_iterate`` so callers can inspect
    or restart from it.
    """

    def __init__(self, message, last_iterate=None, info=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.info = info or {}


class ConfigError(LargeSolError, ValueError):
    """A run configuration failed validation."""
