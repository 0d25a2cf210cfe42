"""The UV model: a two-layer linear network trained on one example.

The model f(x) = v^T U x / sqrt(n_eff) under gradient descent on
0.5 * (f - y)^2 closes exactly on the pair (delta_f, lam) where lam is the
trace of the loss Hessian. This module implements both the parameter-space
update and the closed function-space map, and the coordinates used to
reason about them.

Example:
    hyper = UVHyper(eta=0.45, x_norm=1.0, n_eff=1.0, y=2.0)
    trajectory = simulate(FunctionState(-2.0, 1.0), hyper, steps=100_000)
"""

import logging
import math
from pathlib import Path
from typing import Optional, Union

import numpy as np

from eoslab.data.models import FunctionState, Termination, Trajectory, UVHyper, UVParams
from eoslab.data.schema import TRAJECTORY_COLUMNS
from eoslab.data.storage import OutputStore
from eoslab.data.validator import (
    ValidationError,
    require_count,
    require_positive,
    validate_hyper,
    validate_uv_params,
)

logger = logging.getLogger(__name__)

DIVERGENCE_THRESHOLD = 1e8

ArrayLike = Union[float, np.ndarray]


def step_arrays(
    delta_f: ArrayLike, lam: ArrayLike, eta: ArrayLike, k: float, y: float
) -> tuple[ArrayLike, ArrayLike]:
    """Apply the function-space map elementwise.

    Works on Python floats and on broadcastable numpy arrays, so grids and
    learning-rate sweeps advance in one call.

    Args:
        delta_f: Residuals
        lam: Hessian traces
        eta: Learning rate(s)
        k: x_norm / sqrt(n_eff)
        y: Target

    Returns:
        Tuple (delta_f, lam) after one step.
    """
    k2 = k * k
    s = delta_f + y
    new_df = delta_f * (1.0 - eta * lam + eta * eta * k2 * delta_f * s)
    # pole-free form of lam + eta k^2 df^2 (eta lam - 4 (df + y) / df)
    new_lam = lam + eta * k2 * delta_f * (eta * lam * delta_f - 4.0 * s)
    return new_df, new_lam


def step_function_space(state: FunctionState, hyper: UVHyper) -> FunctionState:
    """Advance (delta_f, lam) by one gradient-descent step.

    Args:
        state: Current function-space state
        hyper: Map parameters

    Returns:
        Next state. Non-finite values are returned as-is.
    """
    new_df, new_lam = step_arrays(state.delta_f, state.lam, hyper.eta, hyper.k, hyper.y)
    return FunctionState(float(new_df), float(new_lam))


def step_two(state: FunctionState, hyper: UVHyper) -> FunctionState:
    """Two applications of the map."""
    return step_function_space(step_function_space(state, hyper), hyper)


def beta(state: FunctionState, hyper: UVHyper) -> float:
    """Signed distance-like coordinate to the EoS manifold.

    beta = lam / (2k) - (delta_f + y). One step multiplies it by
    (1 + eta k delta_f)^2, so beta = 0 is invariant and beta > 0 is kept.
    """
    return state.lam / (2.0 * hyper.k) - (state.delta_f + hyper.y)


def beta_conjugate(state: FunctionState, hyper: UVHyper) -> float:
    """Mirror coordinate phi = lam / (2k) + (delta_f + y).

    One step multiplies it by (1 - eta k delta_f)^2. A state is reachable
    from real weights iff beta >= 0 and phi >= 0.
    """
    return state.lam / (2.0 * hyper.k) + (state.delta_f + hyper.y)


def is_forbidden(state: FunctionState, hyper: UVHyper) -> bool:
    """True iff 2 k |delta_f + y| > lam (no real weights realize the state)."""
    return 2.0 * hyper.k * abs(state.delta_f + hyper.y) > state.lam


def observe(params: UVParams, x: np.ndarray, y: float) -> FunctionState:
    """Function-space state of concrete weights.

    Args:
        params: UV weights
        x: Input vector of length d_in
        y: Target

    Returns:
        FunctionState with delta_f = v^T U x / sqrt(n_eff) - y and
        lam = (|Ux|^2 + |v|^2 |x|^2) / n_eff.

    Raises:
        DimensionMismatchError: If shapes disagree
    """
    x = np.asarray(x, dtype=np.float64)
    validate_uv_params(params, x)
    n_eff = params.n_eff
    ux = params.U @ x
    delta_f = float(params.v @ ux) / math.sqrt(n_eff) - y
    lam = (float(ux @ ux) + float(params.v @ params.v) * float(x @ x)) / n_eff
    return FunctionState(delta_f, lam)


def step_parameter_space(params: UVParams, x: np.ndarray, y: float, eta: float) -> UVParams:
    """One simultaneous gradient-descent step on (U, v).

    Both layers use the residual of the pre-update weights.

    Args:
        params: Current weights
        x: Input vector
        y: Target
        eta: Learning rate

    Returns:
        New UVParams; the input is not modified.

    Raises:
        DimensionMismatchError: If shapes disagree
    """
    x = np.asarray(x, dtype=np.float64)
    validate_uv_params(params, x)
    root = math.sqrt(params.n_eff)
    ux = params.U @ x
    delta_f = float(params.v @ ux) / root - y
    scale = eta * delta_f / root
    new_U = params.U - scale * np.outer(params.v, x)
    new_v = params.v - scale * ux
    return UVParams(U=new_U, v=new_v, n=params.n, p=params.p, sigma_w2=params.sigma_w2)


def _exceeds(delta_f: float, lam: float, threshold: float) -> bool:
    if not (math.isfinite(delta_f) and math.isfinite(lam)):
        return True
    return abs(delta_f) > threshold or lam > threshold


def _trajectory(
    dfs: list[float], lams: list[float], hyper: UVHyper, diverged_at: Optional[int]
) -> Trajectory:
    delta_f = np.array(dfs, dtype=np.float64)
    lam = np.array(lams, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        betas = lam / (2.0 * hyper.k) - (delta_f + hyper.y)
        losses = 0.5 * delta_f * delta_f
    return Trajectory(
        delta_f=delta_f,
        lam=lam,
        betas=betas,
        losses=losses,
        terminated=Termination.COMPLETED if diverged_at is None else Termination.DIVERGED,
        diverged_at=diverged_at,
    )


def simulate(
    initial: FunctionState,
    hyper: UVHyper,
    steps: int,
    divergence_threshold: float = DIVERGENCE_THRESHOLD,
) -> Trajectory:
    """Iterate the function-space map.

    Args:
        initial: Starting state (recorded as step 0)
        hyper: Map parameters
        steps: Number of map applications
        divergence_threshold: Stop once |delta_f| or lam exceeds this, or
            either becomes non-finite

    Returns:
        Trajectory with up to steps + 1 states. When divergence stops the
        run early, the offending state is the last one recorded.

    Raises:
        ValidationError: If hyper, steps or threshold are invalid
    """
    validate_hyper(hyper)
    require_count("steps", steps, minimum=0)
    require_positive("divergence_threshold", divergence_threshold)

    eta, k, y = hyper.eta, hyper.k, hyper.y
    delta_f, lam = float(initial.delta_f), float(initial.lam)
    dfs, lams = [delta_f], [lam]
    diverged_at: Optional[int] = 0 if _exceeds(delta_f, lam, divergence_threshold) else None
    t = 0
    while diverged_at is None and t < steps:
        delta_f, lam = step_arrays(delta_f, lam, eta, k, y)
        t += 1
        dfs.append(delta_f)
        lams.append(lam)
        if _exceeds(delta_f, lam, divergence_threshold):
            diverged_at = t

    if diverged_at is not None:
        logger.debug("UV trajectory diverged at step %d (eta=%r)", diverged_at, eta)
    return _trajectory(dfs, lams, hyper, diverged_at)


def simulate_parameters(
    params: UVParams,
    x: np.ndarray,
    y: float,
    eta: float,
    steps: int,
    divergence_threshold: float = DIVERGENCE_THRESHOLD,
) -> Trajectory:
    """Run gradient descent on concrete weights and observe every iterate.

    The function-space counterpart of :func:`simulate`; both yield the same
    trajectory up to rounding.
    """
    x = np.asarray(x, dtype=np.float64)
    hyper = UVHyper(eta=eta, x_norm=float(np.linalg.norm(x)), n_eff=params.n_eff, y=y)
    validate_hyper(hyper)
    require_count("steps", steps, minimum=0)

    state = observe(params, x, y)
    dfs, lams = [state.delta_f], [state.lam]
    diverged_at: Optional[int] = None
    for t in range(1, steps + 1):
        params = step_parameter_space(params, x, y, eta)
        state = observe(params, x, y)
        dfs.append(state.delta_f)
        lams.append(state.lam)
        if _exceeds(state.delta_f, state.lam, divergence_threshold):
            diverged_at = t
            break
    return _trajectory(dfs, lams, hyper, diverged_at)


def sample_init(
    rng: np.random.Generator, n: int, p: float, sigma_w2: float, d_in: int
) -> UVParams:
    """Draw UV weights i.i.d. from N(0, sigma_w2 / n^p).

    Args:
        rng: Seeded generator; advanced deterministically
        n: Width
        p: Interpolation exponent in [0, 1]
        sigma_w2: Weight variance (0 gives zero weights)
        d_in: Input dimension

    Returns:
        UVParams with U of shape (n, d_in) and v of shape (n,).
    """
    require_count("n", n)
    require_count("d_in", d_in)
    if sigma_w2 < 0.0:
        raise ValidationError(f"sigma_w2: must be non-negative, got {sigma_w2!r}")
    std = math.sqrt(sigma_w2 / float(n) ** p)
    U = rng.normal(0.0, std, size=(n, d_in))
    v = rng.normal(0.0, std, size=n)
    return UVParams(U=U, v=v, n=n, p=p, sigma_w2=sigma_w2)


def sample_observations(
    rng: np.random.Generator,
    count: int,
    n: int,
    p: float,
    sigma_w2: float,
    x: np.ndarray,
    y: float,
    chunk_elements: int = 1 << 22,
) -> tuple[np.ndarray, np.ndarray]:
    """Observe many independent initializations at once.

    Draws weights in chunks of at most ``chunk_elements`` normals per layer
    and returns the residuals and traces of every draw.

    Returns:
        Tuple (delta_f, lam) of arrays of length count.
    """
    require_count("count", count)
    require_count("n", n)
    x = np.asarray(x, dtype=np.float64)
    d_in = x.shape[0]
    std = math.sqrt(sigma_w2 / float(n) ** p)
    n_eff = float(n) ** (1.0 - p)
    x_sq = float(x @ x)
    per_chunk = max(1, chunk_elements // (n * d_in))

    dfs: list[np.ndarray] = []
    lams: list[np.ndarray] = []
    remaining = count
    while remaining > 0:
        size = min(per_chunk, remaining)
        U = rng.normal(0.0, std, size=(size, n, d_in))
        v = rng.normal(0.0, std, size=(size, n))
        ux = U @ x
        dfs.append(np.einsum("bn,bn->b", v, ux) / math.sqrt(n_eff) - y)
        lams.append((np.einsum("bn,bn->b", ux, ux) + np.einsum("bn,bn->b", v, v) * x_sq) / n_eff)
        remaining -= size
    return np.concatenate(dfs), np.concatenate(lams)


def init_moments(
    n: int, p: float, sigma_w2: float, x_norm: float, y: float
) -> tuple[float, float, float, float]:
    """Exact mean and variance of delta_f and lam at initialization.

    Returns:
        Tuple (mean_df, var_df, mean_lam, var_lam) =
        (-y, sigma_w2^2 |x|^2 / n^p, 2 sigma_w2 |x|^2, 4 sigma_w2^2 |x|^4 / n).
    """
    require_count("n", n)
    s2 = sigma_w2 * sigma_w2
    x2 = x_norm * x_norm
    return (-y, s2 * x2 / float(n) ** p, 2.0 * sigma_w2 * x2, 4.0 * s2 * x2 * x2 / n)


def learning_rate_from_constant(c: float, lam0: float) -> float:
    """Learning rate eta = c / lam0 from a learning-rate constant."""
    require_positive("lambda0", lam0)
    if not math.isfinite(c) or c < 0.0:
        raise ValidationError(f"c: must be non-negative finite number, got {c!r}")
    return c / lam0


def export_trajectory(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """Write a trajectory as CSV ``t,delta_f,lambda,beta,loss``."""
    store = OutputStore(Path(path))
    return store.write_csv(TRAJECTORY_COLUMNS, trajectory.to_rows())
