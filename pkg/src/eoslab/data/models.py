"""Data models for the edge-of-stability laboratory.

Models hold the inputs and results of every analysis in memory with type
safety. Result models know how to flatten themselves into the rows of the
tables described in ``eoslab.data.schema``.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional

import numpy as np


@dataclass(frozen=True)
class UVHyper:
    """Parameters of the UV-model update map.

    Attributes:
        eta: Learning rate (> 0)
        x_norm: Input norm ||x|| (> 0)
        n_eff: Effective width n^(1-p) (> 0, may be non-integer)
        y: Scalar target
    """

    eta: float
    x_norm: float
    n_eff: float
    y: float

    @property
    def k(self) -> float:
        """Ratio ||x|| / sqrt(n_eff); the map depends on geometry only through it."""
        return self.x_norm / math.sqrt(self.n_eff)

    def with_eta(self, eta: float) -> "UVHyper":
        """Return a copy with a different learning rate."""
        return replace(self, eta=eta)


@dataclass(frozen=True)
class FunctionState:
    """Function-space state of the UV model.

    Attributes:
        delta_f: Residual f - y
        lam: Hessian trace (scalar NTK), non-negative for reachable states
    """

    delta_f: float
    lam: float

    def as_array(self) -> np.ndarray:
        """Return the state as the 2-vector (delta_f, lam)."""
        return np.array([self.delta_f, self.lam], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Any) -> "FunctionState":
        """Create a state from any length-2 sequence."""
        return cls(delta_f=float(values[0]), lam=float(values[1]))


@dataclass
class UVParams:
    """Concrete UV-model weights.

    Attributes:
        U: First-layer weights, shape (n, d_in)
        v: Second-layer weights, shape (n,)
        n: Width
        p: Interpolation exponent in [0, 1] (0 is NTP, 1 is muP)
        sigma_w2: Initial weight variance
    """

    U: np.ndarray
    v: np.ndarray
    n: int
    p: float
    sigma_w2: float

    @property
    def n_eff(self) -> float:
        """Effective width n^(1-p)."""
        return float(self.n) ** (1.0 - self.p)

    @property
    def d_in(self) -> int:
        """Input dimension."""
        return int(self.U.shape[1])


class Termination(str, Enum):
    """How a simulation ended."""

    COMPLETED = "completed"
    DIVERGED = "diverged"


@dataclass
class Trajectory:
    """Iterates of the function-space map.

    Attributes:
        delta_f: Residual per recorded step (index 0 is the initial state)
        lam: Hessian trace per recorded step
        betas: Distance-to-manifold coordinate per recorded step
        losses: Half squared residual per recorded step
        terminated: Whether the run completed or diverged
        diverged_at: Step index of the first state over threshold, if any
    """

    delta_f: np.ndarray
    lam: np.ndarray
    betas: np.ndarray
    losses: np.ndarray
    terminated: Termination
    diverged_at: Optional[int] = None

    def __len__(self) -> int:
        return int(self.delta_f.shape[0])

    @property
    def states(self) -> list[FunctionState]:
        """Recorded states in order."""
        return [FunctionState(float(d), float(lam)) for d, lam in zip(self.delta_f, self.lam)]

    @property
    def final(self) -> FunctionState:
        """Last recorded state."""
        return FunctionState(float(self.delta_f[-1]), float(self.lam[-1]))

    @property
    def diverged(self) -> bool:
        return self.terminated is Termination.DIVERGED

    def to_rows(self) -> list[tuple]:
        """Rows in order: (t, delta_f, lambda, beta, loss)."""
        return [
            (t, float(d), float(lam), float(b), float(loss))
            for t, (d, lam, b, loss) in enumerate(
                zip(self.delta_f, self.lam, self.betas, self.losses)
            )
        ]


class FixedPointKind(str, Enum):
    """Fixed line I and fixed points II-IV of the UV map."""

    LINE = "I"
    ORIGIN = "II"
    LEFT = "III"
    RIGHT = "IV"


class Stability(str, Enum):
    """Linear stability class of a fixed point."""

    STABLE = "stable"
    UNSTABLE = "unstable"
    SADDLE = "saddle"
    MARGINAL = "marginal"


@dataclass
class Eigenpair:
    """One eigenvalue of a 2x2 matrix and its normalized eigenvector.

    Attributes:
        value: Eigenvalue (complex when the pair is complex conjugate)
        vector: Unit eigenvector; None for complex pairs
    """

    value: complex
    vector: Optional[np.ndarray]

    @property
    def is_complex(self) -> bool:
        return self.value.imag != 0.0

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass
class FixedPointReport:
    """Location, Jacobian eigenpairs and stability of a fixed point.

    Attributes:
        kind: Which fixed point (line I is reported pointwise)
        location: Fixed-point coordinates
        eigenvalues: Jacobian eigenvalues in closed form
        eigenvectors: Matching eigenvectors (not normalized, closed form)
        stability: Stability class
        driving_eigenvalue: Eigenvalue that decided the stability class
        merged_into_line: True for II when y = 0 (II lies on line I)
        above_upper: True when eta >= eta_upper, where only magnitudes decide
    """

    kind: FixedPointKind
    location: FunctionState
    eigenvalues: tuple[float, float]
    eigenvectors: tuple[np.ndarray, np.ndarray]
    stability: Stability
    driving_eigenvalue: float
    merged_into_line: bool = False
    above_upper: bool = False

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready mapping used by the fixed-point report."""
        return {
            "kind": self.kind.value,
            "delta_f": self.location.delta_f,
            "lambda": self.location.lam,
            "eig": [float(value) for value in self.eigenvalues],
            "eigvec": [[float(c) for c in vec] for vec in self.eigenvectors],
            "stability": self.stability.value,
            "driving_eigenvalue": self.driving_eigenvalue,
            "merged_into_line": self.merged_into_line,
            "above_upper": self.above_upper,
        }


@dataclass(frozen=True)
class CriticalRates:
    """Critical learning rates of the UV model.

    Attributes:
        eta_c: EoS onset sqrt(n_eff)/(||x|| y); None when y = 0
        eta_upper: Divergence threshold 2 * eta_c; None when y = 0
        eta_max_y0: Maximum trainable rate 4/lambda_0 for y = 0
    """

    eta_c: Optional[float]
    eta_upper: Optional[float]
    eta_max_y0: Optional[float] = None


@dataclass(frozen=True)
class GridSpec:
    """Cell-centered grid over the (delta_f, lambda) plane.

    Attributes:
        df_range: Inclusive residual bounds
        lam_range: Inclusive second-coordinate bounds
        resolution: Cells per axis
    """

    df_range: tuple[float, float]
    lam_range: tuple[float, float]
    resolution: int

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell centers along each axis."""
        return _centers(self.df_range, self.resolution), _centers(
            self.lam_range, self.resolution
        )


def _centers(bounds: tuple[float, float], resolution: int) -> np.ndarray:
    lo, hi = bounds
    width = (hi - lo) / resolution
    return lo + (np.arange(resolution) + 0.5) * width


class Region(str, Enum):
    """Phase-plane region labels."""

    FORBIDDEN = "forbidden"
    DIVERGENT = "divergent"
    SHARPENING = "sharpening"
    REDUCTION = "reduction"


class SharpeningSign(str, Enum):
    """Sign of the one-step change of lambda."""

    INCREASING = "increasing"
    DECREASING = "decreasing"
    STATIONARY = "stationary"


@dataclass
class PortraitGrid:
    """Sampled update field and region labels.

    Arrays are indexed [i, j] with i along delta_f and j along the second
    coordinate.

    Attributes:
        spec: Grid specification
        steps: 1 for the map, 2 for the two-step map
        coordinates: "lambda" or "beta" for the second axis
        delta_f: Cell-center residuals
        second: Cell-center second coordinates (lambda or beta)
        update: Raw update G per cell, shape (..., 2)
        unit_update: G/|G| per cell, NaN where G = 0
        regions: Region label per cell
        stationary: True where the sharpening sign was exactly zero
    """

    spec: GridSpec
    steps: int
    coordinates: str
    delta_f: np.ndarray
    second: np.ndarray
    update: np.ndarray
    unit_update: np.ndarray
    regions: np.ndarray
    stationary: np.ndarray

    def is_null(self) -> np.ndarray:
        """Cells where the update vanishes (fixed points)."""
        return np.isnan(self.unit_update[..., 0])

    def to_rows(self) -> list[tuple]:
        """Rows in order: (delta_f, second, g_df, g_second, region)."""
        rows: list[tuple] = []
        res = self.spec.resolution
        for i in range(res):
            for j in range(res):
                rows.append(
                    (
                        float(self.delta_f[i, j]),
                        float(self.second[i, j]),
                        _maybe(self.unit_update[i, j, 0]),
                        _maybe(self.unit_update[i, j, 1]),
                        Region(self.regions[i, j]).value,
                    )
                )
        return rows


def _maybe(value: float) -> Optional[float]:
    return None if math.isnan(value) else float(value)


@dataclass
class Nullclines:
    """Sampled nullcline curves keyed by curve name."""

    curves: dict[str, np.ndarray] = field(default_factory=dict)

    def to_rows(self) -> list[tuple]:
        """Rows in order: (delta_f, lambda, curve)."""
        rows: list[tuple] = []
        for name, points in self.curves.items():
            for df, lam in points:
                rows.append((float(df), float(lam), name))
        return rows


@dataclass
class BifurcationDiagram:
    """Late-time values of lambda against learning rate.

    Attributes:
        map_kind: "manifold" or "full"
        etas: Sampled learning rates
        values: Raw recorded lambda values per eta (empty when diverged)
        diverged: Divergence flag per eta
        periods: Detected period per eta (None means aperiodic or diverged)
        bin_tol: Absolute tolerance used to deduplicate recorded values
    """

    map_kind: str
    etas: np.ndarray
    values: list[np.ndarray]
    diverged: np.ndarray
    periods: list[Optional[int]]
    bin_tol: float

    def distinct_values(self, index: int) -> np.ndarray:
        """Recorded values at one eta, deduplicated within bin_tol."""
        values = np.sort(self.values[index])
        if values.size == 0:
            return values
        keep = np.concatenate([[True], np.diff(values) > self.bin_tol])
        return values[keep]

    def first_divergence(self) -> Optional[float]:
        """Smallest sampled eta that diverged."""
        hits = np.flatnonzero(self.diverged)
        return float(self.etas[hits[0]]) if hits.size else None

    def to_rows(self) -> list[tuple]:
        """Long-form rows: (eta, lambda_value)."""
        rows: list[tuple] = []
        for eta, values in zip(self.etas, self.values):
            rows.extend((float(eta), float(value)) for value in values)
        return rows

    def summary(self) -> list[dict[str, Any]]:
        """Per-eta period and divergence, JSON-ready."""
        return [
            {
                "eta": float(eta),
                "period": "aperiodic" if period is None and not diverged else period,
                "diverged": bool(diverged),
            }
            for eta, period, diverged in zip(self.etas, self.periods, self.diverged)
        ]


class Activation(str, Enum):
    LINEAR = "linear"
    RELU = "relu"


class Parameterization(str, Enum):
    SP = "sp"
    INTERP = "interp"


@dataclass(frozen=True)
class NetworkConfig:
    """Fully connected network without biases.

    Attributes:
        depth: Number of weight layers (>= 2)
        width: Hidden width n
        activation: Elementwise nonlinearity of hidden layers
        parameterization: Standard (sp) or interpolating (interp)
        s: Interpolation exponent for interp (1 is muP)
        sigma_w2: Weight variance of non-final layers
    """

    depth: int
    width: int
    activation: Activation = Activation.LINEAR
    parameterization: Parameterization = Parameterization.INTERP
    s: float = 1.0
    sigma_w2: float = 1.0

    def with_overrides(self, **changes: Any) -> "NetworkConfig":
        """Return a copy with selected fields replaced."""
        return replace(self, **changes)


@dataclass
class TrainLog:
    """Record of one gradient-descent run.

    Attributes:
        eta: Realized learning rate
        lambda0: Sharpness at initialization
        losses: Full-dataset loss before each step
        sharpness_steps: Steps at which sharpness and norms were sampled
        sharpness: Sharpness estimate per sample point
        sharpness_converged: Whether power iteration met its tolerance
        weight_norm_total: Total Frobenius norm per sample point
        weight_norm_layers: Per-layer Frobenius norms per sample point
        diverged_at: Step at which the loss became non-finite, if any
    """

    eta: float
    lambda0: float
    losses: np.ndarray
    sharpness_steps: np.ndarray
    sharpness: np.ndarray
    sharpness_converged: np.ndarray
    weight_norm_total: np.ndarray
    weight_norm_layers: np.ndarray
    diverged_at: Optional[int] = None

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None

    def to_rows(self) -> list[tuple]:
        """Rows in order: (step, loss, sharpness, total norm, layer norms...).

        Non-measurement steps carry None in the sharpness and norm columns.
        """
        depth = self.weight_norm_layers.shape[1] if self.weight_norm_layers.ndim == 2 else 0
        sampled = {int(step): idx for idx, step in enumerate(self.sharpness_steps)}
        rows: list[tuple] = []
        for step, loss in enumerate(self.losses):
            idx = sampled.get(step)
            if idx is None:
                rows.append((step, float(loss), None, None) + (None,) * depth)
            else:
                rows.append(
                    (
                        step,
                        float(loss),
                        float(self.sharpness[idx]),
                        float(self.weight_norm_total[idx]),
                    )
                    + tuple(float(v) for v in self.weight_norm_layers[idx])
                )
        return rows


@dataclass
class Dataset:
    """Training examples as row matrices.

    Attributes:
        X: Inputs, shape (P, d_in)
        Y: Targets, shape (P, d_out)
        constant_columns: Input columns found constant by standardization
    """

    X: np.ndarray
    Y: np.ndarray
    constant_columns: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return int(self.X.shape[0])

    @property
    def d_in(self) -> int:
        return int(self.X.shape[1])

    @property
    def d_out(self) -> int:
        return int(self.Y.shape[1])

    def to_rows(self) -> list[tuple]:
        """One row per example: inputs then outputs."""
        return [tuple(float(v) for v in np.concatenate([x, y])) for x, y in zip(self.X, self.Y)]


@dataclass(frozen=True)
class PowerLawSpec:
    """Singular-value rescaling (S)_k = A * (S')_k * k^(-B) for inputs and outputs."""

    A_x: float = 1.0
    B_x: float = 0.0
    A_y: float = 1.0
    B_y: float = 0.0


@dataclass
class PhaseDiagramCell:
    """One (axis1, c) cell of the EoS phase diagram.

    Attributes:
        axis1: Value of the swept initialization knob (sigma_w2 or s)
        c: Learning-rate constant
        eta: Realized learning rate c / lambda_0
        mean_sharpness: Mean sharpness over the measured tail
        value: eta * mean_sharpness / 2
        diverged: True when training diverged
    """

    axis1: float
    c: float
    eta: float
    mean_sharpness: float
    value: float
    diverged: bool


@dataclass
class PhaseDiagram:
    """Grid of EoS phase-diagram cells."""

    axis1_name: str
    cells: list[PhaseDiagramCell]

    def to_rows(self) -> list[tuple]:
        """Rows in order: (axis1, c, value, diverged)."""
        return [(cell.axis1, cell.c, cell.value, cell.diverged) for cell in self.cells]

    def grid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (axis1 values, c values, value matrix [axis1, c])."""
        axis1 = np.array(sorted({cell.axis1 for cell in self.cells}))
        cs = np.array(sorted({cell.c for cell in self.cells}))
        values = np.full((axis1.size, cs.size), np.nan)
        for cell in self.cells:
            i = int(np.searchsorted(axis1, cell.axis1))
            j = int(np.searchsorted(cs, cell.c))
            values[i, j] = np.nan if cell.diverged else cell.value
        return axis1, cs, values
