"""Parallel sweeps over training runs."""

import logging
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from eoslab.data.models import Dataset, NetworkConfig, PhaseDiagram, PhaseDiagramCell
from eoslab.data.validator import ValidationError, require_count
from eoslab.networks.curvature import PRESETS, PowerIterationSettings
from eoslab.networks.fcn import init_network
from eoslab.networks.training import LearningRate, train

logger = logging.getLogger(__name__)

AXES = ("sigma_w2", "s")

# Seed streams: dataset, single training run, then one per sweep cell.
DATA_STREAM = 0
RUN_STREAM = 1
CELL_STREAM_BASE = 2


def derive_rng(base_seed: int, index: int) -> np.random.Generator:
    """Independent generator for task ``index`` of a sweep.

    The seed is numpy's SeedSequence hash of the pair (base_seed, index), so
    results do not depend on how tasks are spread over workers.
    """
    return np.random.default_rng(np.random.SeedSequence([base_seed, index]))


def default_threads() -> int:
    return os.cpu_count() or 1


def eos_phase_diagram(
    axis1: str,
    axis1_values: Sequence[float],
    c_values: Sequence[float],
    config: NetworkConfig,
    data: Dataset,
    steps: int,
    tail: int,
    seed: int = 0,
    threads: Optional[int] = None,
    measure_every: int = 1,
    power: PowerIterationSettings = PRESETS["default"],
    divergence_threshold: float = 1e8,
) -> PhaseDiagram:
    """Grid of eta * mean(lambda^H) / 2 over an initialization knob and c.

    Each cell initializes from its own derived seed, trains for ``steps``
    and averages the last ``tail`` sharpness samples.

    Args:
        axis1: Swept configuration field, "sigma_w2" or "s"
        axis1_values: Values of that field
        c_values: Learning-rate constants
        config: Template configuration
        data: Training set
        steps: Updates per cell
        tail: Number of trailing sharpness samples averaged
        seed: Base seed
        threads: Worker cap; defaults to the number of CPUs
        measure_every: Sharpness sampling interval
        power: Power-iteration settings
        divergence_threshold: Loss above which a cell counts as diverged

    Returns:
        PhaseDiagram with cells in (axis1, c) row-major order.
    """
    if axis1 not in AXES:
        raise ValidationError(f"axis1: must be one of {list(AXES)}, got {axis1!r}")
    if not axis1_values or not c_values:
        raise ValidationError("phase diagram grids: must be non-empty")
    require_count("steps", steps)
    require_count("tail", tail)
    if tail * measure_every > steps:
        raise ValidationError(f"tail: {tail} samples every {measure_every} exceed {steps} steps")

    tasks = [(a, c) for a in axis1_values for c in c_values]
    measure_from = steps - tail * measure_every

    def run(index: int) -> PhaseDiagramCell:
        value, c = tasks[index]
        rng = derive_rng(seed, CELL_STREAM_BASE + index)
        cell_config = config.with_overrides(**{axis1: float(value)})
        params = init_network(cell_config, data.d_in, data.d_out, rng)
        try:
            log = train(
                params,
                cell_config,
                data,
                LearningRate.constant(float(c)),
                steps,
                rng,
                measure_every=measure_every,
                measure_from=measure_from,
                power=power,
                divergence_threshold=divergence_threshold,
            )
        except ValidationError as exc:
            # no positive curvature at init, so c / lambda_0 is undefined
            logger.warning("phase cell %s=%r c=%r skipped: %s", axis1, value, c, exc)
            return PhaseDiagramCell(float(value), float(c), np.nan, np.nan, np.nan, True)
        if log.diverged:
            logger.debug("phase cell %s=%r c=%r diverged", axis1, value, c)
            return PhaseDiagramCell(float(value), float(c), log.eta, np.nan, np.nan, True)
        mean_sharpness = float(np.mean(log.sharpness[-tail:]))
        return PhaseDiagramCell(
            float(value), float(c), log.eta, mean_sharpness, log.eta * mean_sharpness / 2.0, False
        )

    workers = max(1, min(threads or default_threads(), len(tasks)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        cells = list(pool.map(run, range(len(tasks))))

    logger.info(
        "phase diagram: %d cells, %d diverged, %d workers",
        len(cells),
        sum(cell.diverged for cell in cells),
        workers,
    )
    return PhaseDiagram(axis1_name=axis1, cells=cells)
