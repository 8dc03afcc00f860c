"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration or input-descriptor field is invalid."""


class NumericalError(RuntimeError):
    """A solver produced an unusable result (NaN state, residual too large)."""
