"""Exception types shared across the package."""


class HeteroPCAError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(HeteroPCAError, ValueError):
    """Shapes or ranks are incompatible with the requested operation."""


class ContractError(HeteroPCAError, ValueError):
    """An input violates a precondition (symmetry, sign, range)."""


class SingularityError(HeteroPCAError, ArithmeticError):
    """A matrix that must be full rank is (numerically) rank deficient."""


class DataError(HeteroPCAError, ValueError):
    """An input file could not be parsed into the expected structure."""


class ConfigError(HeteroPCAError, ValueError):
    """An experiment configuration is malformed or has unknown keys."""
