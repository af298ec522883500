class ConfigurationError(ValueError):
    """Invalid configuration or grid setup."""


class NumericDegeneracyError(ArithmeticError):
    """The posterior lost all of its mass."""


class InsufficientDataError(ValueError):
    """Too few slots left after burn-in to form a statistic."""
