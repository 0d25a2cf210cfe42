"""Tests for fully connected networks."""

import math

import numpy as np
import pytest

from eoslab.data.models import Activation, NetworkConfig, Parameterization
from eoslab.data.validator import DimensionMismatchError
from eoslab.networks.fcn import (
    flatten,
    forward,
    init_network,
    layer_multipliers,
    layer_shapes,
    layer_variances,
    loss,
    loss_and_grad,
    normalize_inputs,
    parameter_count,
    unflatten,
    weight_norms,
)

SP = NetworkConfig(depth=3, width=4, parameterization=Parameterization.SP, sigma_w2=2.0)
INTERP = NetworkConfig(depth=3, width=4, s=1.0, sigma_w2=2.0)


def _numeric_gradient(params, config, X, Y, h=1e-6):
    theta = flatten(params)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (
            loss(unflatten(up, params), config, X, Y) - loss(unflatten(down, params), config, X, Y)
        ) / (2 * h)
    return grad


class TestLayout:
    """Tests for layer shapes, variances and multipliers."""

    def test_shapes(self):
        """Test weight shapes per layer."""
        assert layer_shapes(SP, d_in=2, d_out=1) == [(4, 2), (4, 4), (1, 4)]

    def test_variances(self):
        """Test initialization variances per parameterization."""
        assert layer_variances(SP, d_in=2) == [1.0, 0.5, 0.25]
        assert layer_variances(INTERP, d_in=2) == [0.5, 0.5, 0.25]
        assert layer_variances(INTERP.with_overrides(s=0.0), d_in=2)[0] == 2.0

    def test_multipliers(self):
        """Test forward multipliers per parameterization."""
        assert layer_multipliers(SP) == [1.0, 1.0, 1.0]
        assert layer_multipliers(INTERP) == [2.0, 1.0, 0.5]
        assert layer_multipliers(INTERP.with_overrides(s=0.0)) == [1.0, 1.0, 1.0]

    def test_init_is_seeded(self):
        """Test that initialization depends only on the seed."""
        first = init_network(SP, 2, 1, np.random.default_rng(5))
        second = init_network(SP, 2, 1, np.random.default_rng(5))
        assert all(np.array_equal(a, b) for a, b in zip(first, second))
        assert [W.shape for W in first] == layer_shapes(SP, 2, 1)
        assert parameter_count(first) == 8 + 16 + 4

    def test_init_variance(self):
        """Test empirical initialization variances."""
        config = NetworkConfig(depth=2, width=512, parameterization=Parameterization.SP)
        params = init_network(config, 64, 1, np.random.default_rng(0))
        assert params[0].var() == pytest.approx(1.0 / 64, rel=0.05)

    def test_mup_residual_statistics_at_init(self):
        """Two-layer muP residuals on one example have mean -y and variance sigma^4 / n."""
        config = NetworkConfig(depth=2, width=64, s=1.0, sigma_w2=1.0)
        x, y = np.array([[1.0]]), 2.0
        rng = np.random.default_rng(17)
        residuals = np.array(
            [forward(init_network(config, 1, 1, rng), config, x)[0, 0] - y for _ in range(10_000)]
        )
        count = residuals.size
        variance = config.sigma_w2**2 / config.width
        assert abs(residuals.mean() + y) <= 3.0 * math.sqrt(variance / count)
        centered = residuals - residuals.mean()
        fourth = float(np.mean(centered**4))
        assert abs(centered.var() - variance) <= 3.0 * math.sqrt((fourth - variance**2) / count)


class TestForward:
    """Tests for the forward pass and loss."""

    def test_two_layer_linear_is_a_product(self):
        """Test that a two-layer linear net is a matrix product."""
        params = [np.array([[1.0], [2.0]]), np.array([[3.0, -1.0]])]
        config = NetworkConfig(depth=2, width=2)
        assert forward(params, config, np.array([[1.5]]))[0, 0] == pytest.approx(1.5)

    def test_relu_zeroes_negative_units(self):
        """Test that relu zeroes negative pre-activations."""
        params = [np.array([[1.0], [-1.0]]), np.array([[1.0, 1.0]])]
        config = NetworkConfig(
            depth=2, width=2, activation=Activation.RELU, parameterization=Parameterization.SP
        )
        assert forward(params, config, np.array([[2.0], [-3.0]])).ravel().tolist() == [2.0, 3.0]

    def test_loss_is_half_mean_square(self):
        """Test the loss normalization."""
        params = [np.array([[1.0]]), np.array([[1.0]])]
        config = NetworkConfig(depth=2, width=1, parameterization=Parameterization.SP)
        X = np.array([[1.0], [2.0]])
        Y = np.array([[0.0], [0.0]])
        assert loss(params, config, X, Y) == pytest.approx(0.25 * (1.0 + 4.0))

    def test_shape_errors(self):
        """Test that mismatched shapes are rejected."""
        params = init_network(SP, 2, 1, np.random.default_rng(0))
        with pytest.raises(DimensionMismatchError, match="X"):
            forward(params, SP, np.ones((3, 5)))
        with pytest.raises(DimensionMismatchError, match="Y"):
            loss_and_grad(params, SP, np.ones((3, 2)), np.ones((3, 2)))
        with pytest.raises(DimensionMismatchError, match="params"):
            forward([params[0], np.ones((1, 3))], SP, np.ones((3, 2)))


class TestGradient:
    """Finite-difference checks of the backward pass."""

    @pytest.mark.parametrize("activation", [Activation.LINEAR, Activation.RELU])
    @pytest.mark.parametrize("parameterization", [Parameterization.SP, Parameterization.INTERP])
    @pytest.mark.parametrize("depth", [2, 3])
    @pytest.mark.parametrize("seed", [0, 1])
    def test_matches_finite_differences(self, activation, parameterization, depth, seed):
        """Test gradients against central differences."""
        config = NetworkConfig(
            depth=depth,
            width=5,
            activation=activation,
            parameterization=parameterization,
            s=0.5,
        )
        rng = np.random.default_rng(seed)
        params = init_network(config, 3, 2, rng)
        X = rng.standard_normal((6, 3))
        Y = rng.standard_normal((6, 2))
        value, grads = loss_and_grad(params, config, X, Y)
        exact = flatten(grads)
        numeric = _numeric_gradient(params, config, X, Y)
        assert value == pytest.approx(loss(params, config, X, Y))
        assert np.linalg.norm(numeric - exact) <= 1e-5 * np.linalg.norm(exact)


class TestHelpers:
    """Tests for normalization, norms and flattening."""

    def test_normalize_inputs(self):
        """Test input norms per parameterization."""
        X = np.array([[3.0, 4.0], [0.0, 0.0], [1.0, 1.0]])
        sp = normalize_inputs(X, SP)
        assert np.linalg.norm(sp[0]) == pytest.approx(math.sqrt(2.0))
        assert sp[1].tolist() == [0.0, 0.0]
        interp = normalize_inputs(X, INTERP)
        assert np.linalg.norm(interp, axis=1).tolist() == pytest.approx([1.0, 0.0, 1.0])

    def test_weight_norms(self):
        """Test per-layer and total weight norms."""
        total, layers = weight_norms([np.ones((2, 2)), 2.0 * np.ones((1, 2))])
        assert layers.tolist() == pytest.approx([2.0, math.sqrt(8.0)])
        assert total == pytest.approx(math.sqrt(12.0))

    def test_unflatten_round_trip_and_size_check(self):
        """Test flatten and unflatten and the size check."""
        params = init_network(SP, 2, 1, np.random.default_rng(0))
        restored = unflatten(flatten(params), params)
        assert all(np.array_equal(a, b) for a, b in zip(params, restored))
        with pytest.raises(DimensionMismatchError):
            unflatten(np.zeros(40), params)
