"""Online deep learning autoencoder: Python bindings for the C++ core."""

from ._core import (
    ConfigError,
    DataError,
    FormatError,
    InvalidInput,
    Model,
    ShapeError,
    cli,
    compute_metrics,
    prequential_synthetic,
)

__all__ = [
    "ConfigError",
    "DataError",
    "FormatError",
    "InvalidInput",
    "Model",
    "ShapeError",
    "cli",
    "compute_metrics",
    "prequential_synthetic",
]
