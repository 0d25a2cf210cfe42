"""Synthetic dataset generators: random, teacher-student, power-law, single example."""

from collections.abc import Sequence
from typing import Any, Union

import numpy as np

from eoslab.data.models import Dataset, NetworkConfig, PowerLawSpec
from eoslab.data.validator import (
    ValidationError,
    require_count,
    require_positive,
    validate_power_law_spec,
)
from eoslab.networks.fcn import forward, init_network
from eoslab.sources.base import DatasetSource


def _require_dims(P: int, d_in: int, d_out: int) -> None:
    require_count("P", P)
    require_count("d_in", d_in)
    require_count("d_out", d_out)


def make_random(P: int, d_in: int, d_out: int, rng: np.random.Generator) -> Dataset:
    """Inputs and targets with i.i.d. standard normal entries and no relation."""
    _require_dims(P, d_in, d_out)
    X = rng.standard_normal((P, d_in))
    Y = rng.standard_normal((P, d_out))
    return Dataset(X=X, Y=Y)


def make_teacher_student(
    teacher: NetworkConfig, P: int, d_in: int, d_out: int, rng: np.random.Generator
) -> Dataset:
    """Targets produced by a randomly initialized teacher network.

    The teacher weights are drawn before the inputs, so a student
    initialized from a generator with the same seed is the teacher itself.
    """
    _require_dims(P, d_in, d_out)
    params = init_network(teacher, d_in, d_out, rng)
    X = rng.standard_normal((P, d_in))
    return Dataset(X=X, Y=forward(params, teacher, X))


def rescale_singular_values(
    matrix: np.ndarray, amplitude: float, exponent: float
) -> np.ndarray:
    """Replace singular values s_k by amplitude * s_k * k^(-exponent), k = 1, 2, ...

    Uses the thin decomposition; singular values are in descending order.
    """
    left, values, right = np.linalg.svd(matrix, full_matrices=False)
    ranks = np.arange(1, values.size + 1, dtype=np.float64)
    scaled = amplitude * values * ranks ** (-exponent)
    return (left * scaled) @ right


def make_power_law(
    P: int, d_in: int, d_out: int, spec: PowerLawSpec, rng: np.random.Generator
) -> Dataset:
    """Random data with power-law singular-value spectra.

    Draws a random dataset and rescales the singular values of X and Y
    separately according to ``spec``.
    """
    _require_dims(P, d_in, d_out)
    validate_power_law_spec(spec)
    raw = make_random(P, d_in, d_out, rng)
    return Dataset(
        X=rescale_singular_values(raw.X, spec.A_x, spec.B_x),
        Y=rescale_singular_values(raw.Y, spec.A_y, spec.B_y),
    )


def make_single_example(
    x: Union[Sequence[float], np.ndarray, tuple[float, int]],
    y: Union[float, Sequence[float]],
) -> Dataset:
    """A one-example dataset.

    Args:
        x: Either the input vector, or a pair (norm, dim) meaning norm * e_1
        y: Scalar target or target vector

    Raises:
        ValidationError: If the norm is not positive
    """
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[1], (int, np.integer)):
        norm, dim = x
        require_positive("norm", norm)
        require_count("dim", int(dim))
        row = np.zeros(int(dim))
        row[0] = float(norm)
    else:
        row = np.asarray(x, dtype=np.float64).ravel()
        if row.size == 0 or not np.any(row):
            raise ValidationError("x: must be a nonzero vector")
    target = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    return Dataset(X=row[None, :], Y=target[None, :])


class RandomSource(DatasetSource):
    """Unstructured Gaussian dataset."""

    def __init__(self, P: int, d_in: int, d_out: int):
        _require_dims(P, d_in, d_out)
        self.P, self.d_in, self.d_out = P, d_in, d_out

    def generate(self, rng: np.random.Generator) -> Dataset:
        return make_random(self.P, self.d_in, self.d_out, rng)

    def describe(self) -> dict[str, Any]:
        return {"kind": "random", "P": self.P, "d_in": self.d_in, "d_out": self.d_out}


class TeacherStudentSource(DatasetSource):
    """Dataset labeled by a random teacher network."""

    def __init__(self, P: int, d_in: int, d_out: int, teacher: NetworkConfig):
        _require_dims(P, d_in, d_out)
        self.P, self.d_in, self.d_out = P, d_in, d_out
        self.teacher = teacher

    def generate(self, rng: np.random.Generator) -> Dataset:
        return make_teacher_student(self.teacher, self.P, self.d_in, self.d_out, rng)

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "teacher",
            "P": self.P,
            "d_in": self.d_in,
            "d_out": self.d_out,
            "depth": self.teacher.depth,
            "width": self.teacher.width,
            "activation": self.teacher.activation.value,
            "parameterization": self.teacher.parameterization.value,
            "s": self.teacher.s,
            "sigma_w2": self.teacher.sigma_w2,
        }


class PowerLawSource(DatasetSource):
    """Random dataset with rescaled singular values."""

    def __init__(self, P: int, d_in: int, d_out: int, spec: PowerLawSpec):
        _require_dims(P, d_in, d_out)
        validate_power_law_spec(spec)
        self.P, self.d_in, self.d_out = P, d_in, d_out
        self.spec = spec

    def generate(self, rng: np.random.Generator) -> Dataset:
        return make_power_law(self.P, self.d_in, self.d_out, self.spec, rng)

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "power-law",
            "P": self.P,
            "d_in": self.d_in,
            "d_out": self.d_out,
            "A_x": self.spec.A_x,
            "B_x": self.spec.B_x,
            "A_y": self.spec.A_y,
            "B_y": self.spec.B_y,
        }


class SingleExampleSource(DatasetSource):
    """One example x = norm * e_1 with a scalar target."""

    def __init__(self, norm: float, y: float, dim: int = 1):
        require_positive("norm", norm)
        require_count("dim", dim)
        self.norm, self.y, self.dim = norm, y, dim

    def generate(self, rng: np.random.Generator) -> Dataset:
        return make_single_example((self.norm, self.dim), self.y)

    def describe(self) -> dict[str, Any]:
        return {"kind": "single", "norm": self.norm, "y": self.y, "dim": self.dim}
