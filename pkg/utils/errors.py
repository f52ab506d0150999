"""Error hierarchy shared by every package.

Each error class carries the process exit code the CLI maps it to:
1 for configuration/usage problems, 2 for data/format problems and
3 for numerical failures.
"""

from typing import Optional


class DaeviError(Exception):
    """Base class for all errors raised by this project."""

    exit_code = 1


class ConfigurationError(DaeviError, ValueError):
    """Invalid settings: indivisible extents, unknown config keys, bad options."""

    exit_code = 1


class ContractError(DaeviError, ValueError):
    """A caller violated an operation's precondition."""

    exit_code = 1


class DimensionError(ContractError):
    """Operand extents do not line up (matmul inner sizes, conv channels)."""


class DataError(DaeviError):
    """Data cannot be used as given (too short, missing, inconsistent)."""

    exit_code = 2


class FormatError(DataError):
    """A file does not follow its binary or text format.

    Args:
        message: Human readable description
        offset: Byte offset where parsing failed
    """

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        self.detail = message
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class NumericalError(DaeviError, ArithmeticError):
    """Non-finite values, diverging losses or failed gradient checks."""

    exit_code = 3


class UsageError(ConfigurationError):
    """Command line could not be parsed."""
