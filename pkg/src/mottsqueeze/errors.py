"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI:
  ConfigError -> 2, ConvergenceError/AccuracyError -> 3, RegimeError -> 4.
"""


class MottsqueezeError(Exception):
    """Base class for all package errors."""


class ConfigError(MottsqueezeError):
    """Invalid or inconsistent configuration input."""


class DomainError(MottsqueezeError, ValueError):
    """Argument outside the documented domain of an operation."""


class ConvergenceError(MottsqueezeError):
    """An iterative solver failed to converge within its budget."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class AccuracyError(MottsqueezeError):
    """A result failed an internal accuracy check (truncation, drift, ...)."""


class RegimeError(MottsqueezeError):
    """Physically out of regime: instability, no phase transition found,
    no curve crossing in the scanned range, ..."""
