"""Exception hierarchy shared by the library and the command-line tool.

The CLI maps these onto process exit codes: ConfigError -> 1,
DataError -> 2, NumericalError -> 3.
"""


class MccaError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(MccaError):
    """Invalid hyperparameters, options, or configuration values."""


class DataError(MccaError):
    """Malformed, inconsistent, or unreadable input data."""


class NumericalError(MccaError):
    """A numerical procedure failed (degenerate component, non-PSD matrix, ...)."""
