"""Exception classes shared across the package.

Each class maps to one machine-parsable error code used by the CLI
(`error_code` attribute), so scripted callers can branch on failures
without parsing prose.
"""


class ImcsiError(Exception):
    """Base class for all package errors."""

    error_code = "internal"


class ConfigError(ImcsiError):
    """Invalid configuration value or inconsistent experiment setup."""

    error_code = "config"


class ContractError(ImcsiError):
    """Caller violated an operation's input contract (shape, range, order)."""

    error_code = "contract"


class DegenerateInputError(ImcsiError):
    """Mathematically degenerate input (zero vector/matrix) with no defined result."""

    error_code = "degenerate"


class DataFormatError(ImcsiError):
    """Malformed dataset or checkpoint file."""

    error_code = "data"
