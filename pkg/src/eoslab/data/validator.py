"""Validation of experiment inputs.

Validates hyperparameters, weights, network configurations and datasets
before any numerics run. Fails hard and fast on any validation error.
"""

import math
from typing import Any

import numpy as np

from eoslab.data.models import (
    Activation,
    Dataset,
    GridSpec,
    NetworkConfig,
    Parameterization,
    PowerLawSpec,
    UVHyper,
    UVParams,
)


class ValidationError(Exception):
    """Raised when input validation fails."""

    pass


class DimensionMismatchError(ValidationError):
    """Raised when array shapes disagree."""

    pass


def _is_positive(value: Any) -> bool:
    """Check that value is a finite real number > 0."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        return False
    return math.isfinite(number) and number > 0.0


def _is_finite(value: Any) -> bool:
    try:
        return math.isfinite(float(value))
    except (TypeError, ValueError):
        return False


def require_positive(name: str, value: Any) -> None:
    """Require a finite positive number.

    Args:
        name: Qualified field name used in the error message
        value: Value to check

    Raises:
        ValidationError: If value is not a finite number > 0
    """
    if not _is_positive(value):
        raise ValidationError(f"{name}: must be positive finite number, got {value!r}")


def require_count(name: str, value: Any, minimum: int = 1) -> None:
    """Require an integer >= minimum."""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ValidationError(f"{name}: must be integer >= {minimum}, got {value!r}")


def validate_hyper(hyper: UVHyper) -> None:
    """Validate UV-model map parameters.

    Args:
        hyper: UVHyper instance to validate

    Raises:
        ValidationError: If validation fails
    """
    require_positive("UVHyper.eta", hyper.eta)
    require_positive("UVHyper.x_norm", hyper.x_norm)
    require_positive("UVHyper.n_eff", hyper.n_eff)
    if not _is_finite(hyper.y):
        raise ValidationError(f"UVHyper.y: must be finite number, got {hyper.y!r}")
    if not _is_positive(hyper.k):
        raise ValidationError("UVHyper.k: x_norm / sqrt(n_eff) must be finite and positive")


def validate_uv_params(params: UVParams, x: np.ndarray) -> None:
    """Validate UV weights against an input vector.

    Args:
        params: UVParams instance to validate
        x: Input vector of length d_in

    Raises:
        ValidationError: If n or p is out of range
        DimensionMismatchError: If U, v and x shapes disagree
    """
    require_count("UVParams.n", params.n)
    if not 0.0 <= params.p <= 1.0:
        raise ValidationError(f"UVParams.p: must be in [0, 1], got {params.p!r}")
    if params.U.ndim != 2 or params.U.shape[0] != params.n:
        raise DimensionMismatchError(
            f"UVParams.U: expected shape ({params.n}, d_in), got {params.U.shape}"
        )
    if params.v.shape != (params.n,):
        raise DimensionMismatchError(
            f"UVParams.v: expected shape ({params.n},), got {params.v.shape}"
        )
    if x.ndim != 1 or x.shape[0] != params.U.shape[1]:
        raise DimensionMismatchError(
            f"x: expected shape ({params.U.shape[1]},), got {x.shape}"
        )


def validate_grid_spec(spec: GridSpec) -> None:
    """Validate a phase-portrait grid."""
    require_count("GridSpec.resolution", spec.resolution, minimum=2)
    for name, (lo, hi) in (("df_range", spec.df_range), ("lam_range", spec.lam_range)):
        if not (_is_finite(lo) and _is_finite(hi)) or lo >= hi:
            raise ValidationError(f"GridSpec.{name}: must be finite with low < high")


def validate_network_config(config: NetworkConfig) -> None:
    """Validate a fully connected network configuration.

    Args:
        config: NetworkConfig instance to validate

    Raises:
        ValidationError: If validation fails
    """
    require_count("NetworkConfig.depth", config.depth, minimum=2)
    require_count("NetworkConfig.width", config.width)
    if not isinstance(config.activation, Activation):
        raise ValidationError(
            f"NetworkConfig.activation: must be one of "
            f"{[a.value for a in Activation]}, got {config.activation!r}"
        )
    if not isinstance(config.parameterization, Parameterization):
        raise ValidationError(
            f"NetworkConfig.parameterization: must be one of "
            f"{[p.value for p in Parameterization]}, got {config.parameterization!r}"
        )
    if not 0.0 <= config.s <= 1.0:
        raise ValidationError(f"NetworkConfig.s: must be in [0, 1], got {config.s!r}")
    if not _is_finite(config.sigma_w2) or config.sigma_w2 < 0.0:
        raise ValidationError(
            f"NetworkConfig.sigma_w2: must be non-negative finite number, got {config.sigma_w2!r}"
        )


def validate_dataset(dataset: Dataset) -> None:
    """Validate a dataset.

    Args:
        dataset: Dataset instance to validate

    Raises:
        DimensionMismatchError: If X, Y are not matrices with equal row counts
        ValidationError: If entries are not finite or the dataset is empty
    """
    if dataset.X.ndim != 2 or dataset.Y.ndim != 2:
        raise DimensionMismatchError("Dataset.X, Dataset.Y: must be 2-D matrices")
    if dataset.X.shape[0] != dataset.Y.shape[0]:
        raise DimensionMismatchError(
            f"Dataset: row counts differ ({dataset.X.shape[0]} vs {dataset.Y.shape[0]})"
        )
    if dataset.X.shape[0] < 1 or dataset.X.shape[1] < 1 or dataset.Y.shape[1] < 1:
        raise ValidationError("Dataset: must have at least one example, input and output")
    if not (np.all(np.isfinite(dataset.X)) and np.all(np.isfinite(dataset.Y))):
        raise ValidationError("Dataset: entries must be finite")


def validate_power_law_spec(spec: PowerLawSpec) -> None:
    """Validate singular-value rescaling parameters."""
    require_positive("PowerLawSpec.A_x", spec.A_x)
    require_positive("PowerLawSpec.A_y", spec.A_y)
    for name, value in (("B_x", spec.B_x), ("B_y", spec.B_y)):
        if not _is_finite(value) or value < 0.0:
            raise ValidationError(f"PowerLawSpec.{name}: must be non-negative, got {value!r}")
