"""Gradient-descent training with sharpness and weight-norm logging."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from eoslab.data.models import Dataset, NetworkConfig, TrainLog
from eoslab.data.validator import (
    ValidationError,
    require_count,
    validate_dataset,
    validate_network_config,
)
from eoslab.dynamics.uv import learning_rate_from_constant
from eoslab.networks.curvature import (
    PRESETS,
    PowerIterationSettings,
    power_iteration,
    top_eigenvalue,
)
from eoslab.networks.fcn import Params, loss_and_grad, weight_norms

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LearningRate:
    """Learning rate given either as a constant c (eta = c / lambda_0) or directly.

    Example:
        LearningRate.constant(0.9)   # eta = 0.9 / lambda_0
        LearningRate.absolute(0.05)  # eta = 0.05
    """

    c: Optional[float] = None
    eta: Optional[float] = None

    @classmethod
    def constant(cls, c: float) -> "LearningRate":
        return cls(c=c)

    @classmethod
    def absolute(cls, eta: float) -> "LearningRate":
        return cls(eta=eta)

    def resolve(self, lambda0: float) -> float:
        """Realized learning rate for a measured initial sharpness."""
        if self.c is not None and self.eta is None:
            return learning_rate_from_constant(self.c, lambda0)
        if self.eta is not None and self.c is None:
            if not math.isfinite(self.eta) or self.eta < 0.0:
                raise ValidationError(f"LearningRate.eta: must be non-negative, got {self.eta!r}")
            return self.eta
        raise ValidationError("LearningRate: exactly one of c and eta must be set")


def gd_step(params: Params, grads: Params, eta: float) -> Params:
    """theta <- theta - eta grad, returning new matrices."""
    return [W - eta * G for W, G in zip(params, grads)]


def _batches(rng: np.random.Generator, size: int, batch_size: int):
    """Endless stream of disjoint shuffled batches, reshuffled every epoch."""
    while True:
        order = rng.permutation(size)
        for start in range(0, size - batch_size + 1, batch_size):
            yield order[start : start + batch_size]


def train(
    params: Params,
    config: NetworkConfig,
    data: Dataset,
    lr: LearningRate,
    steps: int,
    rng: np.random.Generator,
    batch_size: Optional[int] = None,
    measure_every: int = 1,
    measure_from: int = 0,
    power: PowerIterationSettings = PRESETS["default"],
    divergence_threshold: float = math.inf,
) -> TrainLog:
    """Train with plain gradient descent.

    The initial sharpness lambda_0, the largest Hessian eigenvalue, is
    measured on the full dataset before the first step and fixes eta when
    ``lr`` is a constant. Sharpness and
    weight norms are sampled at steps measure_from, measure_from +
    measure_every, ... with the power iteration warm-started from the
    previous dominant direction.

    Args:
        params: Initial weights (not modified)
        config: Network configuration
        data: Training set
        lr: Learning-rate specification
        steps: Number of updates
        rng: Generator for power-iteration starts and batch shuffling
        batch_size: Mini-batch size; None for full-batch gradient descent
        measure_every: Sampling interval for sharpness and norms
        measure_from: First sampled step
        power: Power-iteration settings
        divergence_threshold: Loss above which training counts as diverged
            (non-finite losses always do)

    Returns:
        TrainLog. On divergence the log ends at the offending step.
    """
    validate_network_config(config)
    validate_dataset(data)
    require_count("steps", steps)
    require_count("measure_every", measure_every)
    require_count("measure_from", measure_from, minimum=0)
    if batch_size is not None:
        require_count("batch_size", batch_size)
        if batch_size > data.size:
            raise ValidationError(
                f"batch_size: must be <= dataset size {data.size}, got {batch_size}"
            )

    X, Y = data.X, data.Y
    initial = power_iteration(params, config, X, Y, power, rng)
    # eta = c / lambda_0 needs the top eigenvalue, not a negative dominant one
    lambda0 = top_eigenvalue(params, config, X, Y, power, rng, dominant=initial).value
    eta = lr.resolve(lambda0)
    batches = _batches(rng, data.size, batch_size) if batch_size is not None else None

    losses: list[float] = []
    sample_steps: list[int] = []
    sharp: list[float] = []
    converged: list[bool] = []
    totals: list[float] = []
    layers: list[np.ndarray] = []
    diverged_at: Optional[int] = None
    warm = initial.vector

    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(steps):
            loss, grads = loss_and_grad(params, config, X, Y)
            losses.append(loss)
            if not math.isfinite(loss) or loss > divergence_threshold:
                diverged_at = t
                break

            if t >= measure_from and (t - measure_from) % measure_every == 0:
                if t == 0:
                    estimate = initial
                else:
                    estimate = power_iteration(params, config, X, Y, power, rng, start=warm)
                warm = estimate.vector
                total, per_layer = weight_norms(params)
                sample_steps.append(t)
                sharp.append(estimate.value)
                converged.append(estimate.converged)
                totals.append(total)
                layers.append(per_layer)

            if batches is not None:
                index = next(batches)
                grads = loss_and_grad(params, config, X[index], Y[index])[1]
            params = gd_step(params, grads, eta)

    if diverged_at is not None:
        logger.debug("training diverged at step %d (eta=%r)", diverged_at, eta)
    return TrainLog(
        eta=eta,
        lambda0=lambda0,
        losses=np.array(losses),
        sharpness_steps=np.array(sample_steps, dtype=np.int64),
        sharpness=np.array(sharp),
        sharpness_converged=np.array(converged, dtype=bool),
        weight_norm_total=np.array(totals),
        weight_norm_layers=np.array(layers).reshape(len(layers), config.depth),
        diverged_at=diverged_at,
    )
