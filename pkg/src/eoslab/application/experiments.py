"""Application-layer experiment runners.

Each runner executes one analysis, writes its primary output plus sidecars
through an OutputStore, and returns an Outcome the CLI summarizes.
"""

import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from eoslab.data.models import (
    Dataset,
    FunctionState,
    GridSpec,
    NetworkConfig,
    Region,
    UVHyper,
)
from eoslab.data.schema import (
    BIFURCATION_COLUMNS,
    NULLCLINE_COLUMNS,
    PHASE_DIAGRAM_COLUMNS,
    SPECTRUM_COLUMNS,
    TRAJECTORY_COLUMNS,
    dataset_columns,
    portrait_columns,
    train_log_columns,
)
from eoslab.data.storage import OutputStore
from eoslab.data.validator import ValidationError, validate_dataset, validate_hyper
from eoslab.dynamics.fixed_points import critical_rates, fixed_points, line_lambda_min
from eoslab.dynamics.manifold import bifurcation, period2_onset
from eoslab.dynamics.portrait import nullclines, vector_field
from eoslab.dynamics.timeseries import power_spectrum
from eoslab.dynamics.uv import simulate
from eoslab.networks.curvature import PowerIterationSettings
from eoslab.networks.fcn import init_network, normalize_inputs
from eoslab.networks.sweeps import DATA_STREAM, RUN_STREAM, derive_rng, eos_phase_diagram
from eoslab.networks.training import LearningRate, train
from eoslab.sources.base import DatasetSource
from eoslab.sources.tabular import standardize

logger = logging.getLogger(__name__)


class NumericDivergenceError(Exception):
    """Raised when a run that must stay finite diverges."""

    pass


@dataclass
class Outcome:
    """What a runner produced.

    Attributes:
        paths: Files written, primary output first
        summary: Headline numbers for the console
        diverged: Whether the underlying run diverged
    """

    paths: list[Path] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)
    diverged: bool = False


def _finish(store: OutputStore, config: dict[str, Any], outcome: Outcome) -> Outcome:
    store.write_config(config)
    outcome.paths = store.written
    logger.info("wrote %s", ", ".join(str(p) for p in outcome.paths))
    return outcome


def run_uv_trajectory(
    hyper: UVHyper,
    initial: FunctionState,
    steps: int,
    threshold: float,
    output: Path,
    config: dict[str, Any],
) -> Outcome:
    """Simulate the UV map and write ``t,delta_f,lambda,beta,loss``."""
    trajectory = simulate(initial, hyper, steps, threshold)
    store = OutputStore(output)
    store.write_csv(TRAJECTORY_COLUMNS, trajectory.to_rows())
    final = trajectory.final
    outcome = Outcome(
        summary={
            "steps": len(trajectory) - 1,
            "status": trajectory.terminated.value,
            "diverged_at": trajectory.diverged_at,
            "final_delta_f": final.delta_f,
            "final_lambda": final.lam,
            "final_loss": float(trajectory.losses[-1]),
        },
        diverged=trajectory.diverged,
    )
    return _finish(store, config, outcome)


def run_uv_portrait(
    hyper: UVHyper,
    spec: GridSpec,
    steps: int,
    coordinates: str,
    horizon: int,
    threshold: float,
    output: Path,
    config: dict[str, Any],
) -> Outcome:
    """Write the portrait cells and a ``<stem>.nullclines.csv`` sidecar."""
    grid = vector_field(spec, hyper, steps, coordinates, horizon, threshold)
    samples = 4 * spec.resolution + 1
    curves = nullclines(
        hyper,
        np.linspace(spec.df_range[0], spec.df_range[1], samples),
        np.linspace(max(spec.lam_range[0], 0.0), spec.lam_range[1], samples),
    )
    store = OutputStore(output)
    store.write_csv(portrait_columns(coordinates), grid.to_rows())
    store.write_csv(NULLCLINE_COLUMNS, curves.to_rows(), store.sidecar("nullclines.csv"))

    regions = Counter(Region(label).value for label in grid.regions.ravel())
    outcome = Outcome(
        summary={
            "cells": spec.resolution * spec.resolution,
            "regions": dict(sorted(regions.items())),
            "null_arrows": int(grid.is_null().sum()),
        }
    )
    return _finish(store, config, outcome)


def run_fixed_points(
    hyper: UVHyper,
    line_lambda: Optional[float],
    output: Path,
    config: dict[str, Any],
) -> Outcome:
    """Write the fixed-point report as a JSON array."""
    validate_hyper(hyper)
    line_lambda = line_lambda_min(hyper) if line_lambda is None else line_lambda
    reports = fixed_points(hyper, line_lambda)
    store = OutputStore(output)
    store.write_json([report.to_dict() for report in reports])

    summary: dict[str, Any] = {"reports": reports}
    if hyper.y > 0.0:
        rates = critical_rates(hyper.x_norm, hyper.n_eff, hyper.y)
        eta_1, eta_2 = period2_onset(hyper)
        summary.update(eta_c=rates.eta_c, eta_upper=rates.eta_upper, eta_1=eta_1, eta_2=eta_2)
    return _finish(store, config, Outcome(summary=summary))


def run_bifurcation(
    map_kind: str,
    hyper: UVHyper,
    eta_range: tuple[float, float],
    eta_count: int,
    init: Optional[Union[float, FunctionState]],
    transient: int,
    record: int,
    bin_tol: float,
    max_period: int,
    threshold: float,
    output: Path,
    config: dict[str, Any],
) -> Outcome:
    """Write ``eta,lambda_value`` rows and a ``<stem>.periods.json`` sidecar."""
    diagram = bifurcation(
        map_kind,
        hyper,
        eta_range,
        eta_count,
        init=init,
        transient=transient,
        record=record,
        bin_tol=bin_tol,
        max_period=max_period,
        divergence_threshold=threshold,
    )
    store = OutputStore(output)
    store.write_csv(BIFURCATION_COLUMNS, diagram.to_rows())
    store.write_json(diagram.summary(), store.sidecar("periods.json"))
    outcome = Outcome(
        summary={
            "etas": eta_count,
            "diverged": int(diagram.diverged.sum()),
            "first_divergence": diagram.first_divergence(),
        }
    )
    return _finish(store, config, outcome)


def load_dataset(
    source: DatasetSource,
    seed: int,
    network: Optional[NetworkConfig] = None,
    standardize_inputs: bool = False,
    normalize: bool = False,
) -> Dataset:
    """Generate a dataset and apply the requested preprocessing in order."""
    data = source.generate(derive_rng(seed, DATA_STREAM))
    validate_dataset(data)
    if standardize_inputs:
        data = standardize(data)
    if normalize and network is not None:
        data.X = normalize_inputs(data.X, network)
    return data


def run_train(
    network: NetworkConfig,
    source: DatasetSource,
    lr: LearningRate,
    steps: int,
    seed: int,
    batch_size: Optional[int],
    measure_every: int,
    measure_from: int,
    power: PowerIterationSettings,
    threshold: float,
    standardize_inputs: bool,
    normalize: bool,
    output: Path,
    config: dict[str, Any],
) -> Outcome:
    """Train one network and write its TrainLog."""
    data = load_dataset(source, seed, network, standardize_inputs, normalize)
    config = {**config, "dataset": source.describe()}
    rng = derive_rng(seed, RUN_STREAM)
    params = init_network(network, data.d_in, data.d_out, rng)
    log = train(
        params,
        network,
        data,
        lr,
        steps,
        rng,
        batch_size=batch_size,
        measure_every=measure_every,
        measure_from=measure_from,
        power=power,
        divergence_threshold=threshold,
    )
    store = OutputStore(output)
    store.write_csv(train_log_columns(network.depth), log.to_rows())
    outcome = Outcome(
        summary={
            "eta": log.eta,
            "lambda0": log.lambda0,
            "steps": int(log.losses.size),
            "final_loss": float(log.losses[-1]),
            "final_sharpness": float(log.sharpness[-1]) if log.sharpness.size else None,
            "diverged_at": log.diverged_at,
        },
        diverged=log.diverged,
    )
    return _finish(store, config, outcome)


def run_phase_diagram(
    axis1: str,
    axis1_values: list[float],
    c_values: list[float],
    network: NetworkConfig,
    source: DatasetSource,
    steps: int,
    tail: int,
    seed: int,
    threads: Optional[int],
    measure_every: int,
    power: PowerIterationSettings,
    standardize_inputs: bool,
    normalize: bool,
    output: Path,
    config: dict[str, Any],
) -> Outcome:
    """Sweep (axis1, c) cells and write ``axis1,c,value,diverged``."""
    data = load_dataset(source, seed, network, standardize_inputs, normalize)
    config = {**config, "dataset": source.describe()}
    diagram = eos_phase_diagram(
        axis1,
        axis1_values,
        c_values,
        network,
        data,
        steps,
        tail,
        seed=seed,
        threads=threads,
        measure_every=measure_every,
        power=power,
    )
    store = OutputStore(output)
    store.write_csv(PHASE_DIAGRAM_COLUMNS, diagram.to_rows())
    outcome = Outcome(
        summary={
            "diagram": diagram,
            "cells": len(diagram.cells),
            "diverged": sum(cell.diverged for cell in diagram.cells),
        }
    )
    return _finish(store, config, outcome)


def read_column(path: Union[str, Path], column: str) -> np.ndarray:
    """Read one column of a CSV with a header row, skipping empty cells.

    ``column`` is a header name or a 1-based index.

    Raises:
        ValidationError: If the file or column cannot be read
        NumericDivergenceError: If a cell holds a non-finite number
    """
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None:
                raise ValidationError(f"{path}: empty file")
            index = _column_index(header, column, path)
            values: list[float] = []
            for number, row in enumerate(reader, start=2):
                cell = row[index].strip() if index < len(row) else ""
                if not cell:
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    raise ValidationError(
                        f"{path}: row {number}, column '{column}': not a number {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise NumericDivergenceError(
                        f"{path}: row {number}, column '{column}': non-finite value {cell!r}"
                    )
                values.append(value)
    except OSError as e:
        raise ValidationError(f"{path}: cannot read file: {e}") from e
    return np.array(values)


def _column_index(header: list[str], column: str, path: Any) -> int:
    names = [name.strip() for name in header]
    if column in names:
        return names.index(column)
    if column.isdigit() and 1 <= int(column) <= len(names):
        return int(column) - 1
    raise ValidationError(f"{path}: no column '{column}' (columns: {', '.join(names)})")


def run_spectrum(
    input_path: Path,
    column: str,
    last: Optional[int],
    standardize_series: bool,
    output: Path,
    config: dict[str, Any],
) -> Outcome:
    """Power spectrum of one CSV column, written as ``omega,power``."""
    series = read_column(input_path, column)
    if last is not None:
        series = series[-last:]
    power = power_spectrum(series, standardize=standardize_series)
    store = OutputStore(output)
    store.write_csv(SPECTRUM_COLUMNS, ((omega, float(p)) for omega, p in enumerate(power)))
    outcome = Outcome(
        summary={
            "length": int(series.size),
            "total_power": float(power.sum()),
            "peak_omega": int(np.argmax(power[1:]) + 1) if power.size > 1 else 0,
        }
    )
    return _finish(store, config, outcome)


def run_dataset(
    source: DatasetSource,
    seed: int,
    standardize_inputs: bool,
    output: Path,
    config: dict[str, Any],
) -> Outcome:
    """Generate a dataset and write it one example per row."""
    data = load_dataset(source, seed, standardize_inputs=standardize_inputs)
    config = {**config, "dataset": source.describe()}
    store = OutputStore(output)
    store.write_csv(dataset_columns(data.d_in, data.d_out), data.to_rows())
    outcome = Outcome(
        summary={
            "examples": data.size,
            "d_in": data.d_in,
            "d_out": data.d_out,
            "constant_columns": list(data.constant_columns),
        }
    )
    return _finish(store, config, outcome)

