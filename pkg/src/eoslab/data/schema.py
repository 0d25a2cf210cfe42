"""Output table schemas and output-path resolution."""

import os
from pathlib import Path
from typing import Any, Optional

import numpy as np

OUTPUT_DIR_ENV = "EOSLAB_OUTPUT_DIR"

TRAJECTORY_COLUMNS = ("t", "delta_f", "lambda", "beta", "loss")
NULLCLINE_COLUMNS = ("delta_f", "lambda", "curve")
BIFURCATION_COLUMNS = ("eta", "lambda_value")
PHASE_DIAGRAM_COLUMNS = ("axis1", "c", "value", "diverged")
SPECTRUM_COLUMNS = ("omega", "power")

DEFAULT_FILE_NAMES = {
    "uv-trajectory": "trajectory.csv",
    "uv-portrait": "portrait.csv",
    "fixed-points": "fixed_points.json",
    "uv-bifurcation": "bifurcation.csv",
    "train": "train_log.csv",
    "phase-diagram": "phase_diagram.csv",
    "spectrum": "spectrum.csv",
    "dataset": "dataset.csv",
}


def portrait_columns(coordinates: str = "lambda") -> tuple[str, ...]:
    """Columns of the portrait cell table for the given second coordinate."""
    short = "lam" if coordinates == "lambda" else coordinates
    return ("delta_f", coordinates, "g_df", f"g_{short}", "region")


def train_log_columns(depth: int) -> tuple[str, ...]:
    """Columns of the training log for a network with ``depth`` weight layers."""
    layers = tuple(f"weight_norm_layer_{i}" for i in range(1, depth + 1))
    return ("step", "loss", "sharpness", "weight_norm_total") + layers


def dataset_columns(d_in: int, d_out: int) -> tuple[str, ...]:
    """Columns of a dataset file: inputs then outputs."""
    return tuple(f"x_{i}" for i in range(1, d_in + 1)) + tuple(
        f"y_{i}" for i in range(1, d_out + 1)
    )


def get_output_path(command: str, out: Optional[str] = None) -> Path:
    """Get output path from parameter, environment variable, or default.

    Priority:
    1. out parameter (if provided)
    2. EOSLAB_OUTPUT_DIR environment variable joined with the command's file name
    3. Default: the command's file name in the current directory

    Args:
        command: CLI command name, selects the default file name
        out: Optional explicit output path

    Returns:
        Output file path.
    """
    if out:
        return Path(out)

    file_name = DEFAULT_FILE_NAMES[command]
    env_dir = os.getenv(OUTPUT_DIR_ENV)
    if env_dir:
        return Path(env_dir) / file_name

    return Path(file_name)


def sidecar_path(output: Path, suffix: str = "config.json") -> Path:
    """Path of a file written next to an output, e.g. ``run.config.json``."""
    return output.with_name(f"{output.stem}.{suffix}")


def create_output_directory(path: Path) -> None:
    """Create the parent directory of an output file if it doesn't exist."""
    path.parent.mkdir(parents=True, exist_ok=True)


def format_cell(value: Any) -> str:
    """Format one CSV cell.

    Floats use the shortest round-trip representation, None is an empty
    cell and booleans are lower-case words.
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)
