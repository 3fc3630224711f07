"""Exception types shared across the package."""

from __future__ import annotations


class ConfigurationError(ValueError):
    """A grid, operator, or scenario was set up inconsistently."""


class PreconditionError(ValueError):
    """An operation's stated precondition failed (reported with the measured value)."""


class DivergenceError(RuntimeError):
    """Time evolution produced non-finite values."""

    def __init__(self, message, t=None, norm_history=None):
        super().__init__(message)
        self.t = t
        self.norm_history = list(norm_history or [])
