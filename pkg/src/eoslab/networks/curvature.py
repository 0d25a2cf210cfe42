"""Loss-Hessian curvature: Hessian-vector products and sharpness.

Hessian-vector products are central differences of the exact gradient.
Sharpness is the dominant-magnitude Hessian eigenvalue estimated by power
iteration; a dense finite-difference Hessian serves as an oracle for small
networks.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from eoslab.data.models import NetworkConfig
from eoslab.data.validator import ValidationError, require_count
from eoslab.networks.fcn import Params, flatten, loss_and_grad, unflatten

logger = logging.getLogger(__name__)

DEFAULT_EPS_SCALE = 1e-4


@dataclass(frozen=True)
class PowerIterationSettings:
    """Power-iteration budget.

    Attributes:
        max_iter: Maximum number of Hessian-vector products
        tol: Relative change of successive estimates that counts as converged;
            0 runs exactly max_iter iterations
        eps_scale: Finite-difference scale for Hessian-vector products
    """

    max_iter: int = 100
    tol: float = 1e-6
    eps_scale: float = DEFAULT_EPS_SCALE


PRESETS = {
    "default": PowerIterationSettings(),
    "paper-default": PowerIterationSettings(max_iter=20, tol=0.0),
}


@dataclass
class SharpnessEstimate:
    """Result of one power iteration.

    Attributes:
        value: Rayleigh quotient of the final iterate (may be negative)
        vector: Final unit iterate, usable as a warm start
        iterations: Hessian-vector products spent
        converged: Whether the tolerance was met (always True for fixed budgets)
    """

    value: float
    vector: np.ndarray
    iterations: int
    converged: bool


def _flat_gradient(theta: np.ndarray, like: Params, config, X, Y) -> np.ndarray:
    return flatten(loss_and_grad(unflatten(theta, like), config, X, Y)[1])


def hvp(
    params: Params,
    config: NetworkConfig,
    X: np.ndarray,
    Y: np.ndarray,
    v: Union[np.ndarray, Params],
    eps_scale: float = DEFAULT_EPS_SCALE,
) -> Union[np.ndarray, Params]:
    """Hessian-vector product of the training loss.

    Computes (grad L(theta + eps u) - grad L(theta - eps u)) / (2 eps) * ||v||
    with u = v / ||v|| and eps = eps_scale (1 + ||theta||).

    Args:
        params: Weights at which the Hessian is taken
        config: Network configuration
        X: Inputs
        Y: Targets
        v: Direction, flat or shaped like params
        eps_scale: Relative finite-difference step

    Returns:
        H v in the same form as v.

    Raises:
        ValidationError: If v is zero
    """
    shaped = isinstance(v, list)
    direction = flatten(v) if shaped else np.asarray(v, dtype=np.float64)
    result = _hvp_flat(flatten(params), params, config, X, Y, direction, eps_scale)
    return unflatten(result, params) if shaped else result


def _hvp_flat(
    theta: np.ndarray,
    like: Params,
    config: NetworkConfig,
    X: np.ndarray,
    Y: np.ndarray,
    direction: np.ndarray,
    eps_scale: float,
) -> np.ndarray:
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        raise ValidationError("v: must be a nonzero direction")
    unit = direction / norm
    eps = eps_scale * (1.0 + float(np.linalg.norm(theta)))
    up = _flat_gradient(theta + eps * unit, like, config, X, Y)
    down = _flat_gradient(theta - eps * unit, like, config, X, Y)
    return (up - down) / (2.0 * eps) * norm


def dense_hessian(
    params: Params,
    config: NetworkConfig,
    X: np.ndarray,
    Y: np.ndarray,
    eps_scale: float = DEFAULT_EPS_SCALE,
) -> np.ndarray:
    """Full finite-difference Hessian, symmetrized. Meant for small networks."""
    theta = flatten(params)
    size = theta.size
    hessian = np.empty((size, size))
    for i in range(size):
        basis = np.zeros(size)
        basis[i] = 1.0
        hessian[:, i] = _hvp_flat(theta, params, config, X, Y, basis, eps_scale)
    return 0.5 * (hessian + hessian.T)


def dominant_eigenvalue(matrix: np.ndarray) -> float:
    """Eigenvalue of largest magnitude of a symmetric matrix."""
    values = np.linalg.eigvalsh(matrix)
    return float(values[np.argmax(np.abs(values))])


def _start_vector(
    size: int, rng: Optional[np.random.Generator], start: Optional[np.ndarray]
) -> np.ndarray:
    if start is not None and np.linalg.norm(start) > 0.0:
        vector = np.asarray(start, dtype=np.float64)
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        vector = rng.standard_normal(size)
    return vector / np.linalg.norm(vector)


def _iterate(
    matvec: Callable[[np.ndarray], np.ndarray],
    vector: np.ndarray,
    settings: PowerIterationSettings,
) -> SharpnessEstimate:
    """Power iteration of a symmetric linear map from a unit start vector."""
    estimate = math.nan
    for iteration in range(1, settings.max_iter + 1):
        product = matvec(vector)
        previous, estimate = estimate, float(vector @ product)
        size = float(np.linalg.norm(product))
        if size == 0.0 or not math.isfinite(size):
            return SharpnessEstimate(estimate, vector, iteration, size == 0.0)
        vector = product / size
        if settings.tol > 0.0 and abs(estimate - previous) <= settings.tol * abs(estimate):
            return SharpnessEstimate(estimate, vector, iteration, True)

    converged = settings.tol == 0.0
    if not converged:
        logger.debug("power iteration stopped at %d iterations", settings.max_iter)
    return SharpnessEstimate(estimate, vector, settings.max_iter, converged)


def power_iteration(
    params: Params,
    config: NetworkConfig,
    X: np.ndarray,
    Y: np.ndarray,
    settings: PowerIterationSettings = PRESETS["default"],
    rng: Optional[np.random.Generator] = None,
    start: Optional[np.ndarray] = None,
) -> SharpnessEstimate:
    """Dominant-magnitude Hessian eigenvalue by power iteration.

    Args:
        params: Weights
        config: Network configuration
        X: Inputs
        Y: Targets
        settings: Iteration budget and tolerance
        rng: Generator for the random unit start (ignored with ``start``)
        start: Warm-start direction, e.g. the previous estimate's vector

    Returns:
        SharpnessEstimate. Running out of budget returns the last estimate
        with ``converged`` False.
    """
    require_count("max_iter", settings.max_iter)
    theta = flatten(params)

    def matvec(vector: np.ndarray) -> np.ndarray:
        return _hvp_flat(theta, params, config, X, Y, vector, settings.eps_scale)

    return _iterate(matvec, _start_vector(theta.size, rng, start), settings)


def top_eigenvalue(
    params: Params,
    config: NetworkConfig,
    X: np.ndarray,
    Y: np.ndarray,
    settings: PowerIterationSettings = PRESETS["default"],
    rng: Optional[np.random.Generator] = None,
    dominant: Optional[SharpnessEstimate] = None,
) -> SharpnessEstimate:
    """Largest algebraic Hessian eigenvalue.

    Equal to the dominant-magnitude estimate when that is positive.
    Otherwise power iteration is rerun on H - mu I with mu the (negative)
    dominant eigenvalue, whose spectrum is non-negative with its top at
    lambda_max - mu.

    Args:
        params: Weights
        config: Network configuration
        X: Inputs
        Y: Targets
        settings: Iteration budget and tolerance
        rng: Generator for random starts
        dominant: A dominant-magnitude estimate already computed at params

    Returns:
        SharpnessEstimate whose iterations count both passes.
    """
    if dominant is None:
        dominant = power_iteration(params, config, X, Y, settings, rng)
    if not dominant.value <= 0.0:
        return dominant
    theta = flatten(params)
    shift = dominant.value

    def matvec(vector: np.ndarray) -> np.ndarray:
        product = _hvp_flat(theta, params, config, X, Y, vector, settings.eps_scale)
        return product - shift * vector

    shifted = _iterate(matvec, _start_vector(theta.size, rng, None), settings)
    logger.debug(
        "negative dominant eigenvalue %r, shifted top eigenvalue %r",
        shift,
        shifted.value + shift,
    )
    return SharpnessEstimate(
        shifted.value + shift,
        shifted.vector,
        dominant.iterations + shifted.iterations,
        shifted.converged,
    )


def sharpness(
    params: Params,
    config: NetworkConfig,
    X: np.ndarray,
    Y: np.ndarray,
    m_max: int = 100,
    tol: float = 1e-6,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Sharpness lambda^H of the training loss (see :func:`power_iteration`)."""
    settings = PowerIterationSettings(max_iter=m_max, tol=tol)
    return power_iteration(params, config, X, Y, settings, rng).value
