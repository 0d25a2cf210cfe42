"""Data layer: models, validation, output schemas and file storage."""

from eoslab.data.validator import (
    DimensionMismatchError,
    ValidationError,
    validate_dataset,
    validate_grid_spec,
    validate_hyper,
    validate_network_config,
    validate_power_law_spec,
    validate_uv_params,
)

__all__ = [
    "DimensionMismatchError",
    "ValidationError",
    "validate_hyper",
    "validate_uv_params",
    "validate_grid_spec",
    "validate_network_config",
    "validate_dataset",
    "validate_power_law_spec",
]
