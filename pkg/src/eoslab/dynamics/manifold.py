"""Dynamics on the EoS manifold and bifurcation diagrams.

On the line lam = 2 k (delta_f + y) the UV map reduces to the cubic map
delta_f -> delta_f + u (u - 2) (delta_f + y) with u = eta k delta_f. Past
eta_c its zero-loss fixed point loses stability and a period-doubling
cascade follows. This module iterates that map and the full map over
learning-rate sweeps and locates periodic orbits.
"""

import logging
import math
from collections.abc import Sequence
from typing import Optional, Union

import numpy as np

from eoslab.data.models import BifurcationDiagram, FunctionState, UVHyper
from eoslab.data.validator import (
    ValidationError,
    require_count,
    require_positive,
    validate_hyper,
)
from eoslab.dynamics.fixed_points import jacobian_analytic
from eoslab.dynamics.timeseries import detect_period
from eoslab.dynamics.uv import DIVERGENCE_THRESHOLD, step_arrays, step_function_space

logger = logging.getLogger(__name__)

MAP_KINDS = ("manifold", "full")
DEFAULT_TRANSIENT = 50_000
DEFAULT_RECORD = 1_000
DEFAULT_BIN_TOL = 1e-6
ORBIT_TOL = 1e-10
DIVISOR_SEPARATION = 1e-8


class OrbitNotFoundError(Exception):
    """Raised when no periodic orbit of the requested period is found."""

    pass


def manifold_map(delta_f: float, hyper: UVHyper) -> float:
    """One step of the map restricted to the EoS manifold."""
    u = hyper.eta * hyper.k * delta_f
    return delta_f + u * (u - 2.0) * (delta_f + hyper.y)


def manifold_map_derivative(delta_f: float, hyper: UVHyper) -> float:
    """Derivative of :func:`manifold_map` with respect to delta_f."""
    a = hyper.eta * hyper.k
    u = a * delta_f
    s = delta_f + hyper.y
    return 1.0 + a * (u - 2.0) * s + u * a * s + u * (u - 2.0)


def manifold_lambda(delta_f: float, hyper: UVHyper) -> float:
    """Hessian trace on the manifold: lam = 2 k (delta_f + y)."""
    return 2.0 * hyper.k * (delta_f + hyper.y)


def manifold_loss(lam: float, hyper: UVHyper) -> float:
    """Loss on the manifold as a function of lam.

    Equals (y^2 / 2) (eta_c lam / 2 - 1)^2 with eta_c = 1 / (k y), written
    without the division by y so that y = 0 is covered.
    """
    if lam < 0.0:
        raise ValidationError(f"lam: must be non-negative, got {lam!r}")
    residual = lam / (2.0 * hyper.k) - hyper.y
    return 0.5 * residual * residual


def period2_onset(hyper: UVHyper) -> tuple[float, float]:
    """Learning rates at which the two families of 2-cycles appear.

    Returns:
        Tuple (eta_1, eta_2) with eta_1 = sqrt(n_eff) / (x_norm y) = eta_c
        and eta_2 = ((sqrt(32) - 2) / 2) eta_1.

    Raises:
        ValidationError: If y <= 0
    """
    if hyper.y <= 0.0:
        raise ValidationError(f"UVHyper.y: must be positive, got {hyper.y!r}")
    eta_1 = math.sqrt(hyper.n_eff) / (hyper.x_norm * hyper.y)
    return eta_1, (math.sqrt(32.0) - 2.0) / 2.0 * eta_1


def period_four_onset(hyper: UVHyper) -> float:
    """Learning rate where the first 2-cycle loses stability: (sqrt(5) - 1) eta_c."""
    eta_1, _ = period2_onset(hyper)
    return (math.sqrt(5.0) - 1.0) * eta_1


def period_two_points(hyper: UVHyper) -> list[tuple[float, float]]:
    """Closed-form 2-cycles of the manifold map.

    With z = eta k delta_f and b = eta k y the map is z -> z + z (z - 2) (z + b).
    A 2-cycle {z1, z2} is determined by its sum p and product q, with
    q = p^2 + (b - 2) p + 2 - 2b. The first family has p = 1 - b and exists
    for b > 1 (eta > eta_1); the second has p^2 + (b - 3) p + 4 - 2b = 0 and
    exists for b^2 + 2b - 7 > 0 (eta > eta_2).

    Returns:
        Real 2-cycles as (delta_f_1, delta_f_2) pairs, first family first.
    """
    validate_hyper(hyper)
    a = hyper.eta * hyper.k
    b = a * hyper.y
    sums: list[float] = []
    if b > 1.0:
        sums.append(1.0 - b)
    disc = b * b + 2.0 * b - 7.0
    if disc > 0.0:
        root = math.sqrt(disc)
        sums.extend([0.5 * (3.0 - b + root), 0.5 * (3.0 - b - root)])

    cycles: list[tuple[float, float]] = []
    for p in sums:
        q = p * p + (b - 2.0) * p + 2.0 - 2.0 * b
        spread = p * p - 4.0 * q
        if spread <= 0.0:
            continue
        r = math.sqrt(spread)
        cycles.append(((p + r) / (2.0 * a), (p - r) / (2.0 * a)))
    return cycles


def two_cycle_multiplier(hyper: UVHyper) -> float:
    """Stability multiplier of the first 2-cycle, -2 s^2 - 8 s + 1 with s = b - 1.

    The cycle is stable while the multiplier lies in (-1, 1).

    Raises:
        OrbitNotFoundError: If the cycle does not exist (eta <= eta_1)
    """
    validate_hyper(hyper)
    b = hyper.eta * hyper.k * hyper.y
    if b <= 1.0:
        raise OrbitNotFoundError(f"no 2-cycle below eta_1 (eta={hyper.eta!r})")
    s = b - 1.0
    return -2.0 * s * s - 8.0 * s + 1.0


def _iterate_manifold(x: float, hyper: UVHyper, times: int) -> tuple[float, float]:
    """Return (g^times(x), d g^times / dx)."""
    slope = 1.0
    for _ in range(times):
        slope *= manifold_map_derivative(x, hyper)
        x = manifold_map(x, hyper)
    return x, slope


def _iterate_full(point: np.ndarray, hyper: UVHyper, times: int) -> tuple[np.ndarray, np.ndarray]:
    jac = np.eye(2)
    state = FunctionState.from_array(point)
    for _ in range(times):
        jac = jacobian_analytic(state, hyper) @ jac
        state = step_function_space(state, hyper)
    return state.as_array(), jac


def _newton(
    residual_and_jacobian, start: np.ndarray, max_iter: int, tol: float
) -> Optional[np.ndarray]:
    """Damped Newton iteration on F(x) = 0; None when it fails."""
    x = start.astype(np.float64)
    value, jac = residual_and_jacobian(x)
    for _ in range(max_iter):
        if not np.all(np.isfinite(value)):
            return None
        if np.max(np.abs(value)) <= tol:
            return x
        try:
            step = np.linalg.solve(jac, -value)
        except np.linalg.LinAlgError:
            return None
        norm = np.max(np.abs(value))
        damping = 1.0
        for _ in range(40):
            trial = x + damping * step
            trial_value, trial_jac = residual_and_jacobian(trial)
            if np.all(np.isfinite(trial_value)) and np.max(np.abs(trial_value)) < norm:
                break
            damping *= 0.5
        else:
            return None
        x, value, jac = trial, trial_value, trial_jac
    return x if np.max(np.abs(value)) <= tol else None


def _proper_divisors(period: int) -> list[int]:
    return [d for d in range(1, period) if period % d == 0]


def default_guesses(hyper: UVHyper, count: int = 41) -> np.ndarray:
    """Residual guesses spanning the manifold between II and beyond IV."""
    reach = 2.0 / (hyper.eta * hyper.k)
    return np.linspace(-abs(hyper.y) - 0.5 * reach, 1.25 * reach, count)


def find_period_orbit(
    map_kind: str,
    hyper: UVHyper,
    period: int,
    guesses: Optional[Sequence[Union[float, FunctionState]]] = None,
    max_iter: int = 100,
    tol: float = ORBIT_TOL,
) -> list[FunctionState]:
    """Points of period-``period`` orbits found by Newton's method.

    Solves M^period(x) = x from each guess and keeps solutions that are not
    fixed by any proper divisor power (separation DIVISOR_SEPARATION).

    Args:
        map_kind: "manifold" for the 1-D map, "full" for the 2-D map
        hyper: Map parameters
        period: Orbit period (>= 1)
        guesses: Starting points; residuals for the manifold map, states (or
            residuals lifted onto the manifold) for the full map
        max_iter: Newton iteration budget per guess
        tol: Acceptance threshold on |M^period(x) - x|

    Returns:
        Distinct orbit points sorted by delta_f. Manifold points carry
        lam = manifold_lambda(delta_f).

    Raises:
        ValidationError: If map_kind or period is invalid
        OrbitNotFoundError: If no guess converges to a proper orbit
    """
    if map_kind not in MAP_KINDS:
        raise ValidationError(f"map: must be one of {list(MAP_KINDS)}, got {map_kind!r}")
    require_count("period", period)
    validate_hyper(hyper)
    if guesses is None:
        guesses = list(default_guesses(hyper))

    def power(x: np.ndarray, times: int) -> np.ndarray:
        if map_kind == "manifold":
            return np.array([_iterate_manifold(float(x[0]), hyper, times)[0]])
        return _iterate_full(x, hyper, times)[0]

    def residual(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        with np.errstate(all="ignore"):
            if map_kind == "manifold":
                image, slope = _iterate_manifold(float(x[0]), hyper, period)
                return np.array([image - x[0]]), np.array([[slope - 1.0]])
            image_2d, jac = _iterate_full(x, hyper, period)
            return image_2d - x, jac - np.eye(2)

    found: list[np.ndarray] = []
    for guess in guesses:
        start = _start_point(map_kind, guess, hyper)
        root = _newton(residual, start, max_iter, tol)
        if root is None:
            continue
        divisors = _proper_divisors(period)
        if any(np.max(np.abs(power(root, d) - root)) <= DIVISOR_SEPARATION for d in divisors):
            continue
        orbit = [root]
        for _ in range(period - 1):
            orbit.append(power(orbit[-1], 1))
        for point in orbit:
            if all(np.max(np.abs(point - other)) > DIVISOR_SEPARATION for other in found):
                found.append(point)

    if not found:
        raise OrbitNotFoundError(
            f"no period-{period} orbit of the {map_kind} map found at eta={hyper.eta!r}"
        )
    found.sort(key=lambda point: float(point[0]))
    if map_kind == "manifold":
        return [FunctionState(float(p[0]), manifold_lambda(float(p[0]), hyper)) for p in found]
    return [FunctionState.from_array(p) for p in found]


def _start_point(map_kind: str, guess: Union[float, FunctionState], hyper: UVHyper) -> np.ndarray:
    if isinstance(guess, FunctionState):
        if map_kind == "manifold":
            return np.array([guess.delta_f])
        return guess.as_array()
    delta_f = float(guess)
    if map_kind == "manifold":
        return np.array([delta_f])
    return np.array([delta_f, manifold_lambda(delta_f, hyper)])


def bifurcation(
    map_kind: str,
    hyper: UVHyper,
    eta_range: tuple[float, float],
    eta_count: int,
    init: Optional[Union[float, FunctionState]] = None,
    transient: int = DEFAULT_TRANSIENT,
    record: int = DEFAULT_RECORD,
    bin_tol: float = DEFAULT_BIN_TOL,
    max_period: int = 32,
    divergence_threshold: float = DIVERGENCE_THRESHOLD,
) -> BifurcationDiagram:
    """Late-time lam values over a learning-rate sweep.

    All learning rates advance together as one vectorized iteration.

    Args:
        map_kind: "manifold" or "full"
        hyper: Template parameters; its eta is replaced by the sweep
        eta_range: Inclusive (low, high) learning rates
        eta_count: Number of evenly spaced learning rates (>= 2)
        init: Starting residual (manifold) or state (full). Defaults to
            delta_f = -y / 4 for the manifold map and, for the full map, the
            mean unit-variance initialization (-y, 2 |x|^2)
        transient: Steps discarded before recording
        record: Steps recorded
        bin_tol: Tolerance for deduplicating values and detecting periods
        max_period: Largest period detected
        divergence_threshold: Threshold on |delta_f| and lam

    Returns:
        BifurcationDiagram; diverged learning rates record no values.
    """
    if map_kind not in MAP_KINDS:
        raise ValidationError(f"map: must be one of {list(MAP_KINDS)}, got {map_kind!r}")
    validate_hyper(hyper)
    require_count("eta_count", eta_count, minimum=2)
    require_count("transient", transient, minimum=0)
    require_count("record", record, minimum=2 * max_period)
    require_positive("bin_tol", bin_tol)
    lo, hi = eta_range
    require_positive("eta_min", lo)
    if hi <= lo:
        raise ValidationError(f"eta_range: must satisfy low < high, got {eta_range!r}")

    etas = np.linspace(lo, hi, eta_count)
    k, y = hyper.k, hyper.y
    df, lam = _initial_arrays(map_kind, init, hyper, eta_count)
    diverged = np.zeros(eta_count, dtype=bool)
    recorded = np.empty((record, eta_count))

    with np.errstate(all="ignore"):
        for t in range(transient + record):
            if map_kind == "manifold":
                u = etas * k * df
                df = df + u * (u - 2.0) * (df + y)
                lam = 2.0 * k * (df + y)
            else:
                df, lam = step_arrays(df, lam, etas, k, y)
            bad = ~(np.isfinite(df) & np.isfinite(lam))
            bad |= (np.abs(df) > divergence_threshold) | (lam > divergence_threshold)
            if bad.any():
                diverged |= bad
                df = np.where(diverged, 0.0, df)
                lam = np.where(diverged, 0.0, lam)
            if t >= transient:
                recorded[t - transient] = lam

    values: list[np.ndarray] = []
    periods: list[Optional[int]] = []
    for i in range(eta_count):
        if diverged[i]:
            values.append(np.empty(0))
            periods.append(None)
        else:
            column = recorded[:, i].copy()
            values.append(column)
            periods.append(detect_period(column, max_period=max_period, tol=bin_tol))

    diagram = BifurcationDiagram(
        map_kind=map_kind,
        etas=etas,
        values=values,
        diverged=diverged,
        periods=periods,
        bin_tol=bin_tol,
    )
    logger.info(
        "bifurcation (%s): %d learning rates, %d diverged",
        map_kind,
        eta_count,
        int(diverged.sum()),
    )
    return diagram


def _initial_arrays(
    map_kind: str, init: Optional[Union[float, FunctionState]], hyper: UVHyper, count: int
) -> tuple[np.ndarray, np.ndarray]:
    if map_kind == "manifold":
        if init is None:
            delta_f = -hyper.y / 4.0
        elif isinstance(init, FunctionState):
            delta_f = init.delta_f
        else:
            delta_f = float(init)
        df = np.full(count, delta_f)
        return df, 2.0 * hyper.k * (df + hyper.y)
    if init is None:
        state = FunctionState(-hyper.y, 2.0 * hyper.x_norm**2)
    elif isinstance(init, FunctionState):
        state = init
    else:
        state = FunctionState(float(init), manifold_lambda(float(init), hyper))
    return np.full(count, state.delta_f), np.full(count, state.lam)
