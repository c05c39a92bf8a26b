"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid configuration or argument values."""


class DimensionError(ValidationError):
    """Vector/matrix shapes do not agree."""


class SchemaError(ValidationError):
    """A distribution or document is missing required axes or fields."""


class UnknownVariableError(KeyError):
    """A named random variable is not present in a joint distribution."""


class ResourceLimitError(RuntimeError):
    """An exhaustive computation would exceed its configured size cap."""
