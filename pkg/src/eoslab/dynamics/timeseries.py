"""Time-series analysis of sharpness trajectories."""

import math
from typing import Optional

import numpy as np

from eoslab.data.validator import ValidationError, require_count, require_positive


class SignalError(ValidationError):
    """Raised when a series cannot be analyzed (too short, constant, non-finite)."""

    pass


def _as_series(values) -> np.ndarray:
    series = np.asarray(values, dtype=np.float64).ravel()
    if series.size < 2:
        raise SignalError(f"series: needs at least 2 samples, got {series.size}")
    if not np.all(np.isfinite(series)):
        raise SignalError("series: contains non-finite values")
    return series


def standardize_series(values) -> np.ndarray:
    """Subtract the mean and divide by the population standard deviation.

    Raises:
        SignalError: If the series is shorter than 2, non-finite or constant
    """
    series = _as_series(values)
    centered = series - series.mean()
    std = math.sqrt(float(np.mean(centered * centered)))
    if std == 0.0:
        raise SignalError("series: has zero variance")
    return centered / std


def power_spectrum(values, standardize: bool = False) -> np.ndarray:
    """Power P(omega) = |F(omega)|^2 with F(omega) = (1/T) sum_t x(t) e^(-2 pi i omega t / T).

    The sum of P over omega = 0..T-1 equals the mean of x^2, so a
    standardized series has total power 1 and no power at omega = 0.

    Args:
        values: Series of length T
        standardize: Standardize the series first

    Returns:
        Array of T powers.
    """
    series = standardize_series(values) if standardize else _as_series(values)
    transform = np.fft.fft(series) / series.size
    return transform.real * transform.real + transform.imag * transform.imag


def detect_period(values, max_period: int = 32, tol: float = 1e-6) -> Optional[int]:
    """Smallest period of the tail of a series.

    The examined tail is the final half of the series, extended to
    2 * max_period samples when the half is shorter. A period p is accepted
    when |x(t + p) - x(t)| <= tol (1 + |x(t)|) over the tail and the tail
    spans at least two periods.

    Args:
        values: Series of length >= 2 * max_period
        max_period: Largest period tried
        tol: Relative tolerance

    Returns:
        The period, or None when the tail is aperiodic or non-finite.

    Raises:
        ValidationError: If the series is shorter than 2 * max_period
    """
    require_count("max_period", max_period)
    series = np.asarray(values, dtype=np.float64).ravel()
    if series.size < 2 * max_period:
        raise ValidationError(
            f"series: needs at least {2 * max_period} samples for max_period={max_period}"
        )
    tail = series[-max(series.size // 2, 2 * max_period):]
    if not np.all(np.isfinite(tail)):
        return None
    slack = tol * (1.0 + np.abs(tail))
    for period in range(1, max_period + 1):
        if tail.size < 2 * period:
            break
        if np.all(np.abs(tail[period:] - tail[:-period]) <= slack[:-period]):
            return period
    return None


def band_count(values, bin_width: float) -> int:
    """Number of occupied bins of width ``bin_width`` (bins aligned at 0)."""
    require_positive("bin_width", bin_width)
    data = np.asarray(values, dtype=np.float64).ravel()
    data = data[np.isfinite(data)]
    return int(np.unique(np.floor(data / bin_width)).size)
