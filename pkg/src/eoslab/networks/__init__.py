"""Fully connected networks, loss curvature and gradient-descent training."""

from eoslab.networks.curvature import (
    PRESETS,
    PowerIterationSettings,
    dense_hessian,
    hvp,
    power_iteration,
    sharpness,
)
from eoslab.networks.fcn import forward, init_network, loss_and_grad, normalize_inputs, weight_norms
from eoslab.networks.sweeps import eos_phase_diagram
from eoslab.networks.training import LearningRate, gd_step, train

__all__ = [
    "PRESETS",
    "LearningRate",
    "PowerIterationSettings",
    "dense_hessian",
    "eos_phase_diagram",
    "forward",
    "gd_step",
    "hvp",
    "init_network",
    "loss_and_grad",
    "normalize_inputs",
    "power_iteration",
    "sharpness",
    "train",
    "weight_norms",
]
