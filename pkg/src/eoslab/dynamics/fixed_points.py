"""Fixed points of the UV map, their Jacobians and stability.

The map has a line of fixed points I at delta_f = 0 and isolated points
II, III and IV, all in closed form. Jacobian eigenpairs are closed form as
well; the numeric Jacobian is kept as a cross-check.
"""

import math
from typing import Optional

import numpy as np

from eoslab.data.models import (
    CriticalRates,
    Eigenpair,
    FixedPointKind,
    FixedPointReport,
    FunctionState,
    Stability,
    UVHyper,
)
from eoslab.data.validator import ValidationError, require_positive, validate_hyper
from eoslab.dynamics.uv import step_function_space

MARGINAL_TOL = 1e-9


def line_lambda_min(hyper: UVHyper) -> float:
    """Smallest lam for which (0, lam) is reachable: 2 k |y|."""
    return 2.0 * hyper.k * abs(hyper.y)


def critical_rates(
    x_norm: float, n_eff: float, y: float, lambda0_for_y0: Optional[float] = None
) -> CriticalRates:
    """Critical learning rates of the UV model.

    Args:
        x_norm: Input norm
        n_eff: Effective width
        y: Target (>= 0)
        lambda0_for_y0: Initial trace, required when y = 0

    Returns:
        CriticalRates. For y > 0, eta_c = sqrt(n_eff) / (x_norm y) and
        eta_upper = 2 eta_c; for y = 0 only eta_max_y0 = 4 / lambda0.

    Raises:
        ValidationError: If y < 0, or y = 0 without lambda0_for_y0
    """
    require_positive("x_norm", x_norm)
    require_positive("n_eff", n_eff)
    if y < 0.0:
        raise ValidationError(f"y: must be non-negative, got {y!r}")
    if y == 0.0:
        if lambda0_for_y0 is None:
            raise ValidationError("lambda0_for_y0: required when y = 0")
        require_positive("lambda0_for_y0", lambda0_for_y0)
        return CriticalRates(eta_c=None, eta_upper=None, eta_max_y0=4.0 / lambda0_for_y0)
    eta_c = math.sqrt(n_eff) / (x_norm * y)
    return CriticalRates(eta_c=eta_c, eta_upper=2.0 * eta_c)


def eos_condition(c: float, lam0: float, hyper: UVHyper) -> bool:
    """Whether eta = c / lam0 exceeds eta_c, i.e. lam0 < c k y."""
    return lam0 < c * hyper.k * hyper.y


def jacobian_analytic(state: FunctionState, hyper: UVHyper) -> np.ndarray:
    """Exact Jacobian of the map at an arbitrary state.

    Rows are (d delta_f', d lam'), columns (d/d delta_f, d/d lam).
    """
    eta, y = hyper.eta, hyper.y
    k2 = hyper.k * hyper.k
    df, lam = state.delta_f, state.lam
    e2k2 = eta * eta * k2
    return np.array(
        [
            [1.0 - eta * lam + e2k2 * (3.0 * df * df + 2.0 * y * df), -eta * df],
            [2.0 * e2k2 * lam * df - 4.0 * eta * k2 * (2.0 * df + y), 1.0 + e2k2 * df * df],
        ]
    )


def jacobian_numeric(state: FunctionState, hyper: UVHyper, rel_step: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of the map.

    Args:
        state: Point of evaluation
        hyper: Map parameters
        rel_step: Relative step in (0, 1e-3], scaled by max(1, |coordinate|)

    Returns:
        2x2 matrix.

    Raises:
        ValidationError: If rel_step is out of range
    """
    if not 0.0 < rel_step <= 1e-3:
        raise ValidationError(f"rel_step: must be in (0, 1e-3], got {rel_step!r}")
    point = state.as_array()
    jac = np.empty((2, 2))
    for col in range(2):
        h = rel_step * max(1.0, abs(point[col]))
        up, down = point.copy(), point.copy()
        up[col] += h
        down[col] -= h
        f_up = step_function_space(FunctionState.from_array(up), hyper).as_array()
        f_down = step_function_space(FunctionState.from_array(down), hyper).as_array()
        jac[:, col] = (f_up - f_down) / (up[col] - down[col])
    return jac


def _unit(vector: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    nonzero = np.flatnonzero(vector)
    if nonzero.size and vector[nonzero[0]] < 0.0:
        vector = -vector
    return vector + 0.0


def _null_vector(matrix: np.ndarray, value: float) -> Optional[np.ndarray]:
    shifted = matrix - value * np.eye(2)
    rows = sorted(shifted, key=lambda row: float(np.hypot(row[0], row[1])), reverse=True)
    row = rows[0]
    if np.hypot(row[0], row[1]) == 0.0:
        return None
    return _unit(np.array([row[1], -row[0]]))


def eig2(matrix: np.ndarray) -> tuple[Eigenpair, Eigenpair]:
    """Eigenpairs of a real 2x2 matrix from the characteristic polynomial.

    Real eigenvalues come in descending order with unit eigenvectors whose
    first nonzero component is positive. Complex pairs carry no vectors;
    their magnitudes are what stability uses.

    Args:
        matrix: Finite 2x2 matrix

    Returns:
        Two Eigenpair values.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise ValidationError("matrix: must be a finite 2x2 matrix")
    half_trace = 0.5 * (m[0, 0] + m[1, 1])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = half_trace * half_trace - det

    if disc < 0.0:
        root = math.sqrt(-disc)
        return (
            Eigenpair(complex(half_trace, root), None),
            Eigenpair(complex(half_trace, -root), None),
        )

    root = math.sqrt(disc)
    big = half_trace + math.copysign(root, half_trace)
    small = det / big if big != 0.0 else half_trace - root
    first, second = (big, small) if big >= small else (small, big)

    v_first = _null_vector(m, first)
    v_second = _null_vector(m, second)
    if v_first is None and v_second is None:
        v_first, v_second = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    return (
        Eigenpair(complex(first, 0.0), v_first if v_first is not None else v_second),
        Eigenpair(complex(second, 0.0), v_second if v_second is not None else v_first),
    )


def classify_stability(magnitudes: tuple[float, ...]) -> Stability:
    """Stability class from eigenvalue magnitudes.

    Marginal when any magnitude is 1 within MARGINAL_TOL; otherwise stable,
    unstable or saddle by how many magnitudes are below 1.
    """
    if any(abs(m - 1.0) <= MARGINAL_TOL for m in magnitudes):
        return Stability.MARGINAL
    below = sum(m < 1.0 for m in magnitudes)
    if below == len(magnitudes):
        return Stability.STABLE
    if below == 0:
        return Stability.UNSTABLE
    return Stability.SADDLE


def _report(
    kind: FixedPointKind,
    location: FunctionState,
    eigenvalues: tuple[float, float],
    eigenvectors: tuple[np.ndarray, np.ndarray],
    above_upper: bool,
    merged: bool = False,
) -> FixedPointReport:
    # the eigenvalue closest to the unit circle decides the class
    driving = min(eigenvalues, key=lambda value: abs(abs(value) - 1.0))
    return FixedPointReport(
        kind=kind,
        location=location,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        stability=classify_stability(tuple(abs(v) for v in eigenvalues)),
        driving_eigenvalue=driving,
        merged_into_line=merged,
        above_upper=above_upper,
    )


def line_point(hyper: UVHyper, line_lambda: float) -> FixedPointReport:
    """Report for the point (0, line_lambda) of fixed line I.

    The eigenvalue 1 along the line is always marginal; stability follows
    the transverse eigenvalue 1 - eta lam.
    """
    k2 = hyper.k * hyper.k
    transverse = 1.0 - hyper.eta * line_lambda
    along = np.array([0.0, 1.0])
    if hyper.y != 0.0:
        across = np.array([line_lambda / (4.0 * k2 * hyper.y), 1.0])
    else:
        across = np.array([1.0, 0.0])
    return FixedPointReport(
        kind=FixedPointKind.LINE,
        location=FunctionState(0.0, line_lambda),
        eigenvalues=(1.0, transverse),
        eigenvectors=(along, across),
        stability=classify_stability((abs(transverse),)),
        driving_eigenvalue=transverse,
        above_upper=hyper.eta * hyper.k * hyper.y >= 2.0,
    )


def fixed_points(hyper: UVHyper, line_lambda: float) -> list[FixedPointReport]:
    """Closed-form fixed points I-IV with Jacobian eigenpairs.

    Args:
        hyper: Map parameters
        line_lambda: Which point of line I to report

    Returns:
        Reports in the order I, II, III, IV. For y = 0, II lies on line I
        and is flagged ``merged_into_line``.

    Raises:
        ValidationError: If line_lambda is below line_lambda_min(hyper)

    Example:
        reports = fixed_points(UVHyper(0.5, 1.0, 1.0, 2.0), line_lambda=3.0)
        reports[2].location  # FunctionState(delta_f=-4.0, lam=4.0)
    """
    validate_hyper(hyper)
    bound = line_lambda_min(hyper)
    if line_lambda < bound:
        raise ValidationError(f"line_lambda: must be >= {bound!r} for line I, got {line_lambda!r}")

    eta, k, y = hyper.eta, hyper.k, hyper.y
    a = eta * k * y
    above = a >= 2.0
    off_manifold = 2.0 / (k * eta)
    half_inv_k = 1.0 / (2.0 * k)
    slow = np.array([1.0, a * k])

    reports = [line_point(hyper, line_lambda)]
    reports.append(
        _report(
            FixedPointKind.ORIGIN,
            FunctionState(-y, 0.0),
            ((1.0 - a) * (1.0 - a), (1.0 + a) * (1.0 + a)),
            (np.array([-half_inv_k, 1.0]), np.array([half_inv_k, 1.0])),
            above,
            merged=y == 0.0,
        )
    )
    reports.append(
        _report(
            FixedPointKind.LEFT,
            FunctionState(-off_manifold, 4.0 / eta - 2.0 * k * y),
            (9.0, 5.0 - 2.0 * a),
            (slow, np.array([-half_inv_k, 1.0])),
            above,
        )
    )
    reports.append(
        _report(
            FixedPointKind.RIGHT,
            FunctionState(off_manifold, 4.0 / eta + 2.0 * k * y),
            (9.0, 5.0 + 2.0 * a),
            (slow, np.array([half_inv_k, 1.0])),
            above,
        )
    )
    return reports
