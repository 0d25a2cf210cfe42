"""Application layer for eoslab.

This layer orchestrates the numerical modules and the output files.
"""

from eoslab.application.config import ConfigError, apply_config, effective_config, load_config
from eoslab.application.experiments import (
    NumericDivergenceError,
    Outcome,
    load_dataset,
    read_column,
    run_bifurcation,
    run_dataset,
    run_fixed_points,
    run_phase_diagram,
    run_spectrum,
    run_train,
    run_uv_portrait,
    run_uv_trajectory,
)
from eoslab.application.log import configure_logging

__all__ = [
    "ConfigError",
    "NumericDivergenceError",
    "Outcome",
    "apply_config",
    "configure_logging",
    "effective_config",
    "load_config",
    "load_dataset",
    "read_column",
    "run_bifurcation",
    "run_dataset",
    "run_fixed_points",
    "run_phase_diagram",
    "run_spectrum",
    "run_train",
    "run_uv_portrait",
    "run_uv_trajectory",
]
