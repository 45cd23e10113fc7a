"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid argument, shape, or invariant violation on construction."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its tolerance.

    ``diagnostics`` carries whatever the failing routine recorded (boundary
    amplitudes, cutoff traces, ...).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics if diagnostics is not None else {}


class ConfigError(ValueError):
    """Malformed or unknown configuration keys."""
