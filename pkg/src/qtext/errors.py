"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError and its subclasses exit 2,
DataError and its subclasses exit 3, NumericError exits 4.
"""


class QtextError(Exception):
    """Base class for all package errors."""


class ConfigError(QtextError):
    """Invalid configuration or parameter value."""


class ValidationError(ConfigError):
    """Structurally invalid operation input (shapes, indices)."""


class CapacityError(ConfigError):
    """Input exceeds the representable register size."""


class DataError(QtextError):
    """Dataset or embedding file problem."""


class DegenerateInputError(DataError):
    """Degenerate input: zero vector, empty token list, and the like."""


class NumericError(QtextError):
    """Non-finite or numerically degenerate computation."""
