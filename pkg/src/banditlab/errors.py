"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment or policy configuration."""


class ConvergenceError(ArithmeticError):
    """A series was evaluated outside its convergence region."""


class PrecisionError(ArithmeticError):
    """A numerical routine could not reach the requested accuracy."""


class PrecisionWarning(UserWarning):
    """Requested accuracy is at risk (e.g. slowly converging series)."""
