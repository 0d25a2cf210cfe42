"""Fully connected networks without biases.

Parameters are a list of weight matrices W_l of shape (fan_out, fan_in).
Layer l computes h_l = m_l a_{l-1} W_l^T with a_0 = x, a_l = phi(h_l) on
hidden layers and f = h_d. The multipliers m_l are 1 for the standard
parameterization; the interpolating one uses n^(s/2) on the first layer
and n^(-s/2) on the last.
"""

import math

import numpy as np

from eoslab.data.models import Activation, NetworkConfig, Parameterization
from eoslab.data.validator import (
    DimensionMismatchError,
    require_count,
    validate_network_config,
)

Params = list[np.ndarray]


def layer_multipliers(config: NetworkConfig) -> list[float]:
    """Forward multipliers m_1..m_d."""
    multipliers = [1.0] * config.depth
    if config.parameterization is Parameterization.INTERP:
        scale = float(config.width) ** (config.s / 2.0)
        multipliers[0] = scale
        multipliers[-1] = 1.0 / scale
    return multipliers


def layer_shapes(config: NetworkConfig, d_in: int, d_out: int) -> list[tuple[int, int]]:
    """Weight shapes (fan_out, fan_in) of every layer."""
    n = config.width
    shapes = [(n, d_in)]
    shapes.extend((n, n) for _ in range(config.depth - 2))
    shapes.append((d_out, n))
    return shapes


def layer_variances(config: NetworkConfig, d_in: int) -> list[float]:
    """Initialization variance of every layer."""
    n = float(config.width)
    if config.parameterization is Parameterization.SP:
        first = config.sigma_w2 / d_in
    else:
        first = config.sigma_w2 / n**config.s
    return [first] + [config.sigma_w2 / n] * (config.depth - 2) + [1.0 / n]


def init_network(
    config: NetworkConfig, d_in: int, d_out: int, rng: np.random.Generator
) -> Params:
    """Draw layer weights from zero-mean normals, first layer first.

    Args:
        config: Network configuration
        d_in: Input dimension
        d_out: Output dimension
        rng: Seeded generator; advanced deterministically

    Returns:
        List of weight matrices.
    """
    validate_network_config(config)
    require_count("d_in", d_in)
    require_count("d_out", d_out)
    return [
        rng.normal(0.0, math.sqrt(variance), size=shape)
        for shape, variance in zip(
            layer_shapes(config, d_in, d_out), layer_variances(config, d_in)
        )
    ]


def _activate(config: NetworkConfig, h: np.ndarray) -> np.ndarray:
    if config.activation is Activation.RELU:
        return np.maximum(h, 0.0)
    return h


def _activation_slope(config: NetworkConfig, h: np.ndarray) -> np.ndarray:
    if config.activation is Activation.RELU:
        # subgradient 0 at the kink
        return (h > 0.0).astype(np.float64)
    return np.ones_like(h)


def _check_shapes(params: Params, X: np.ndarray) -> None:
    if X.ndim != 2 or X.shape[1] != params[0].shape[1]:
        raise DimensionMismatchError(
            f"X: expected shape (P, {params[0].shape[1]}), got {X.shape}"
        )
    for i in range(1, len(params)):
        if params[i].shape[1] != params[i - 1].shape[0]:
            raise DimensionMismatchError(
                f"params[{i}]: fan_in {params[i].shape[1]} does not match "
                f"fan_out {params[i - 1].shape[0]} of the previous layer"
            )


def _forward_cache(
    params: Params, config: NetworkConfig, X: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Return (layer inputs a_0..a_{d-1}, pre-activations h_1..h_d)."""
    multipliers = layer_multipliers(config)
    inputs = [X]
    pre = []
    for i, (W, m) in enumerate(zip(params, multipliers)):
        h = m * (inputs[-1] @ W.T)
        pre.append(h)
        if i < len(params) - 1:
            inputs.append(_activate(config, h))
    return inputs, pre


def forward(params: Params, config: NetworkConfig, X: np.ndarray) -> np.ndarray:
    """Network outputs for a batch of inputs.

    Args:
        params: Weight matrices
        config: Network configuration
        X: Inputs of shape (P, d_in)

    Returns:
        Outputs of shape (P, d_out).

    Raises:
        DimensionMismatchError: If shapes disagree
    """
    X = np.asarray(X, dtype=np.float64)
    _check_shapes(params, X)
    return _forward_cache(params, config, X)[1][-1]


def loss_and_grad(
    params: Params, config: NetworkConfig, X: np.ndarray, Y: np.ndarray
) -> tuple[float, Params]:
    """Mean squared error (1 / 2P) sum ||f(x) - y||^2 and its exact gradient.

    Returns:
        Tuple (loss, gradients) with gradients shaped like params.

    Raises:
        DimensionMismatchError: If shapes disagree
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    _check_shapes(params, X)
    if Y.shape != (X.shape[0], params[-1].shape[0]):
        raise DimensionMismatchError(
            f"Y: expected shape ({X.shape[0]}, {params[-1].shape[0]}), got {Y.shape}"
        )
    multipliers = layer_multipliers(config)
    inputs, pre = _forward_cache(params, config, X)
    residual = pre[-1] - Y
    count = X.shape[0]
    loss = 0.5 * float(np.sum(residual * residual)) / count

    grads: Params = [np.empty(0)] * len(params)
    delta = residual / count
    for i in range(len(params) - 1, -1, -1):
        grads[i] = multipliers[i] * (delta.T @ inputs[i])
        if i > 0:
            delta = multipliers[i] * (delta @ params[i]) * _activation_slope(config, pre[i - 1])
    return loss, grads


def loss(params: Params, config: NetworkConfig, X: np.ndarray, Y: np.ndarray) -> float:
    """Mean squared error without the gradient."""
    residual = forward(params, config, X) - np.asarray(Y, dtype=np.float64)
    return 0.5 * float(np.sum(residual * residual)) / X.shape[0]


def normalize_inputs(X: np.ndarray, config: NetworkConfig) -> np.ndarray:
    """Rescale rows to the parameterization's input norm.

    Standard parameterization uses ||x||^2 = d_in, interpolating ||x|| = 1.
    Zero rows are left at zero.
    """
    X = np.asarray(X, dtype=np.float64)
    target = math.sqrt(X.shape[1]) if config.parameterization is Parameterization.SP else 1.0
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    safe = np.where(norms > 0.0, norms, 1.0)
    return X * (target / safe)


def weight_norms(params: Params) -> tuple[float, np.ndarray]:
    """Frobenius norm of every layer and their root-sum-square total."""
    layers = np.array([float(np.linalg.norm(W)) for W in params])
    return float(math.sqrt(float(np.sum(layers * layers)))), layers


def flatten(params: Params) -> np.ndarray:
    """Concatenate all weights into one vector."""
    return np.concatenate([W.ravel() for W in params])


def unflatten(vector: np.ndarray, like: Params) -> Params:
    """Split a flat vector into matrices shaped like ``like``."""
    out: Params = []
    offset = 0
    for W in like:
        out.append(vector[offset : offset + W.size].reshape(W.shape))
        offset += W.size
    if offset != vector.size:
        raise DimensionMismatchError(f"vector: expected {offset} entries, got {vector.size}")
    return out


def parameter_count(params: Params) -> int:
    return int(sum(W.size for W in params))
