"""Phase portrait of the UV map on a grid.

Samples the update field G = M^steps(s) - s, the nullclines of both
coordinates, and labels each cell as forbidden, divergent, sharpening or
reduction. Cells are evaluated at their centers, all at once with numpy.
"""

import logging
from typing import Optional

import numpy as np

from eoslab.data.models import (
    FunctionState,
    GridSpec,
    Nullclines,
    PortraitGrid,
    Region,
    SharpeningSign,
    UVHyper,
)
from eoslab.data.validator import (
    ValidationError,
    require_count,
    require_positive,
    validate_grid_spec,
    validate_hyper,
)
from eoslab.dynamics.uv import DIVERGENCE_THRESHOLD, is_forbidden, simulate, step_arrays

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 1000
COORDINATES = ("lambda", "beta")


def sharpening_sign(state: FunctionState, hyper: UVHyper) -> SharpeningSign:
    """Sign of lam_{t+1} - lam_t, i.e. of delta_f (eta lam delta_f - 4 (delta_f + y))."""
    value = state.delta_f * (
        hyper.eta * state.lam * state.delta_f - 4.0 * (state.delta_f + hyper.y)
    )
    if value > 0.0:
        return SharpeningSign.INCREASING
    if value < 0.0:
        return SharpeningSign.DECREASING
    return SharpeningSign.STATIONARY


def classify_region(
    state: FunctionState,
    hyper: UVHyper,
    horizon: int = DEFAULT_HORIZON,
    divergence_threshold: float = DIVERGENCE_THRESHOLD,
) -> Region:
    """Label a state by its region of the phase plane.

    Forbidden states come first, then states whose trajectory diverges
    within ``horizon`` steps. The rest are split by the sharpening sign;
    a stationary sign counts as reduction.
    """
    require_count("horizon", horizon)
    if is_forbidden(state, hyper):
        return Region.FORBIDDEN
    if simulate(state, hyper, horizon, divergence_threshold).diverged:
        return Region.DIVERGENT
    if sharpening_sign(state, hyper) is SharpeningSign.INCREASING:
        return Region.SHARPENING
    return Region.REDUCTION


def _diverges(
    delta_f: np.ndarray, lam: np.ndarray, hyper: UVHyper, horizon: int, threshold: float
) -> np.ndarray:
    """Vectorized divergence test with the same stopping rule as ``simulate``."""
    with np.errstate(all="ignore"):
        diverged = ~(np.isfinite(delta_f) & np.isfinite(lam))
        diverged |= (np.abs(delta_f) > threshold) | (lam > threshold)
        df, lm = delta_f.copy(), lam.copy()
        for _ in range(horizon):
            if diverged.all():
                break
            df, lm = step_arrays(df, lm, hyper.eta, hyper.k, hyper.y)
            bad = ~(np.isfinite(df) & np.isfinite(lm)) | (np.abs(df) > threshold) | (lm > threshold)
            diverged |= bad
            # park diverged cells so they stay finite
            df = np.where(diverged, 0.0, df)
            lm = np.where(diverged, 0.0, lm)
    return diverged


def classify_grid(
    delta_f: np.ndarray,
    lam: np.ndarray,
    hyper: UVHyper,
    horizon: int = DEFAULT_HORIZON,
    divergence_threshold: float = DIVERGENCE_THRESHOLD,
) -> tuple[np.ndarray, np.ndarray]:
    """Region labels for arrays of states.

    Returns:
        Tuple (regions, stationary): an object array of Region and a mask of
        cells whose sharpening sign was exactly zero.
    """
    require_count("horizon", horizon)
    forbidden = 2.0 * hyper.k * np.abs(delta_f + hyper.y) > lam
    divergent = ~forbidden & _diverges(delta_f, lam, hyper, horizon, divergence_threshold)
    sign = delta_f * (hyper.eta * lam * delta_f - 4.0 * (delta_f + hyper.y))

    regions = np.empty(delta_f.shape, dtype=object)
    regions[...] = Region.REDUCTION
    regions[sign > 0.0] = Region.SHARPENING
    regions[divergent] = Region.DIVERGENT
    regions[forbidden] = Region.FORBIDDEN
    stationary = (sign == 0.0) & ~forbidden & ~divergent
    return regions, stationary


def vector_field(
    spec: GridSpec,
    hyper: UVHyper,
    steps: int = 1,
    coordinates: str = "lambda",
    horizon: int = DEFAULT_HORIZON,
    divergence_threshold: float = DIVERGENCE_THRESHOLD,
) -> PortraitGrid:
    """Sample the update field and region labels on a cell-centered grid.

    Args:
        spec: Grid over (delta_f, second coordinate)
        hyper: Map parameters
        steps: 1 for the map, 2 for the two-step map
        coordinates: Second axis, "lambda" or "beta"
        horizon: Steps simulated to decide divergence
        divergence_threshold: Divergence threshold for the labels

    Returns:
        PortraitGrid. unit_update is NaN where the update vanishes.

    Raises:
        ValidationError: If the grid, steps or coordinates are invalid
    """
    validate_grid_spec(spec)
    validate_hyper(hyper)
    if steps not in (1, 2):
        raise ValidationError(f"steps: must be 1 or 2, got {steps!r}")
    if coordinates not in COORDINATES:
        raise ValidationError(
            f"coordinates: must be one of {list(COORDINATES)}, got {coordinates!r}"
        )

    df_centers, second_centers = spec.centers()
    delta_f, second = np.meshgrid(df_centers, second_centers, indexing="ij")
    k, y = hyper.k, hyper.y
    lam = 2.0 * k * (second + delta_f + y) if coordinates == "beta" else second

    with np.errstate(all="ignore"):
        new_df, new_lam = delta_f, lam
        for _ in range(steps):
            new_df, new_lam = step_arrays(new_df, new_lam, hyper.eta, k, y)
        new_second = new_lam / (2.0 * k) - (new_df + y) if coordinates == "beta" else new_lam
        update = np.stack([new_df - delta_f, new_second - second], axis=-1)
        norm = np.hypot(update[..., 0], update[..., 1])
        unit = np.where((norm > 0.0)[..., None], update / norm[..., None], np.nan)

    regions, stationary = classify_grid(delta_f, lam, hyper, horizon, divergence_threshold)
    logger.debug(
        "portrait %dx%d steps=%d: %d forbidden, %d divergent",
        spec.resolution,
        spec.resolution,
        steps,
        int(np.sum(regions == Region.FORBIDDEN)),
        int(np.sum(regions == Region.DIVERGENT)),
    )
    return PortraitGrid(
        spec=spec,
        steps=steps,
        coordinates=coordinates,
        delta_f=delta_f,
        second=second,
        update=update,
        unit_update=unit,
        regions=regions,
        stationary=stationary,
    )


def nullclines(
    hyper: UVHyper, df_samples: np.ndarray, lam_samples: Optional[np.ndarray] = None
) -> Nullclines:
    """Sampled nullclines of both coordinates.

    Curves:
        delta_f: lam = eta k^2 delta_f (delta_f + y), where delta_f is unchanged
        lambda: lam = 4 (delta_f + y) / (eta delta_f), where lam is unchanged
        axis: delta_f = 0, shared by both, sampled at ``lam_samples``

    Points with negative or non-finite lam are dropped.
    """
    validate_hyper(hyper)
    df = np.asarray(df_samples, dtype=np.float64)
    eta, k2, y = hyper.eta, hyper.k * hyper.k, hyper.y

    df_curve = eta * k2 * df * (df + y)
    nonzero = df[df != 0.0]
    lam_curve = 4.0 * (nonzero + y) / (eta * nonzero)

    curves = {
        "delta_f": _keep(df, df_curve),
        "lambda": _keep(nonzero, lam_curve),
    }
    if lam_samples is None:
        top = max((float(c[:, 1].max()) for c in curves.values() if c.size), default=1.0)
        lam_samples = np.linspace(0.0, top, df.size)
    lam_axis = np.asarray(lam_samples, dtype=np.float64)
    curves["axis"] = _keep(np.zeros_like(lam_axis), lam_axis)
    return Nullclines(curves=curves)


def _keep(df: np.ndarray, lam: np.ndarray) -> np.ndarray:
    mask = np.isfinite(lam) & (lam >= 0.0)
    return np.column_stack([df[mask], lam[mask]]) if mask.any() else np.empty((0, 2))


def nullcline_intersections(
    hyper: UVHyper, df_range: tuple[float, float], samples: int = 2001
) -> list[FunctionState]:
    """Crossings of the two curved nullclines away from delta_f = 0.

    Brackets sign changes of their difference on a sample grid and refines
    each by bisection.
    """
    require_count("samples", samples, minimum=3)
    require_positive("eta", hyper.eta)
    eta, k2, y = hyper.eta, hyper.k * hyper.k, hyper.y

    def gap(d: np.ndarray) -> np.ndarray:
        return eta * k2 * d * (d + y) - 4.0 * (d + y) / (eta * d)

    grid = np.linspace(df_range[0], df_range[1], samples)
    grid = grid[grid != 0.0]
    values = gap(grid)
    found: list[FunctionState] = []
    for i in range(grid.size - 1):
        lo, hi = grid[i], grid[i + 1]
        if lo < 0.0 < hi:
            continue
        g_lo, g_hi = values[i], values[i + 1]
        if g_lo == 0.0:
            root = lo
        elif g_lo * g_hi < 0.0:
            root = 0.5 * (lo + hi)
            for _ in range(200):
                g_mid = gap(np.array([root]))[0]
                if g_mid == 0.0 or root in (lo, hi):
                    break
                if (g_mid < 0.0) == (g_lo < 0.0):
                    lo, g_lo = root, g_mid
                else:
                    hi = root
                root = 0.5 * (lo + hi)
        else:
            continue
        found.append(FunctionState(float(root), float(eta * k2 * root * (root + y))))
    return found
