"""Error hierarchy and console presentation shared by every package."""

from .errors import (
    ConfigurationError,
    ContractError,
    DaeviError,
    DataError,
    DimensionError,
    FormatError,
    NumericalError,
    UsageError,
)
from .run_logger import RunLogger

__all__ = [
    "ConfigurationError",
    "ContractError",
    "DaeviError",
    "DataError",
    "DimensionError",
    "FormatError",
    "NumericalError",
    "UsageError",
    "RunLogger",
]
