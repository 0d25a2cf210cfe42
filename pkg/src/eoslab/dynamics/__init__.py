"""UV-model dynamics: the function-space map, its fixed points, phase portrait,
EoS-manifold reduction and time-series analysis of sharpness trajectories.
"""

from eoslab.dynamics.fixed_points import critical_rates, eig2, fixed_points, jacobian_numeric
from eoslab.dynamics.manifold import (
    OrbitNotFoundError,
    bifurcation,
    find_period_orbit,
    manifold_lambda,
    manifold_loss,
    manifold_map,
    period2_onset,
)
from eoslab.dynamics.portrait import classify_region, nullclines, sharpening_sign, vector_field
from eoslab.dynamics.timeseries import (
    SignalError,
    band_count,
    detect_period,
    power_spectrum,
    standardize_series,
)
from eoslab.dynamics.uv import (
    beta,
    init_moments,
    is_forbidden,
    observe,
    sample_init,
    simulate,
    step_function_space,
    step_parameter_space,
    step_two,
)

__all__ = [
    "OrbitNotFoundError",
    "SignalError",
    "band_count",
    "beta",
    "bifurcation",
    "classify_region",
    "critical_rates",
    "detect_period",
    "eig2",
    "find_period_orbit",
    "fixed_points",
    "init_moments",
    "is_forbidden",
    "jacobian_numeric",
    "manifold_lambda",
    "manifold_loss",
    "manifold_map",
    "nullclines",
    "observe",
    "period2_onset",
    "power_spectrum",
    "sample_init",
    "sharpening_sign",
    "simulate",
    "standardize_series",
    "step_function_space",
    "step_parameter_space",
    "step_two",
    "vector_field",
]
