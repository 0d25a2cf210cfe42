"""Numeric CSV ingestion and feature standardization."""

import csv
import logging
import math
from pathlib import Path
from typing import Any, Union

import numpy as np

from eoslab.data.models import Dataset
from eoslab.data.validator import require_count, validate_dataset
from eoslab.sources.base import DatasetFormatError, DatasetSource

logger = logging.getLogger(__name__)


def load_csv(
    path: Union[str, Path], d_in: int, d_out: int, header: bool = False
) -> Dataset:
    """Read one example per row, inputs then outputs.

    Args:
        path: CSV file
        d_in: Number of input columns
        d_out: Number of output columns
        header: Skip the first row

    Returns:
        Dataset.

    Raises:
        DatasetFormatError: If the file is unreadable, a row has the wrong
            number of columns or a cell is not a finite number
    """
    require_count("d_in", d_in)
    require_count("d_out", d_out)
    width = d_in + d_out
    rows: list[list[float]] = []
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            for number, row in enumerate(csv.reader(handle), start=1):
                if header and number == 1:
                    continue
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != width:
                    raise DatasetFormatError(
                        f"{path}: row {number}: expected {width} columns, got {len(row)}"
                    )
                rows.append(
                    [_parse_cell(path, number, col, cell) for col, cell in enumerate(row, 1)]
                )
    except OSError as e:
        raise DatasetFormatError(f"{path}: cannot read file: {e}") from e

    if not rows:
        raise DatasetFormatError(f"{path}: no data rows")
    table = np.array(rows)
    dataset = Dataset(X=table[:, :d_in], Y=table[:, d_in:])
    validate_dataset(dataset)
    return dataset


def _parse_cell(path: Any, row: int, column: int, cell: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DatasetFormatError(
            f"{path}: row {row}, column {column}: not a number {cell!r}"
        ) from None
    if not math.isfinite(value):
        raise DatasetFormatError(f"{path}: row {row}, column {column}: not finite {cell!r}")
    return value


def standardize(dataset: Dataset) -> Dataset:
    """Give every input column zero mean and unit population variance.

    Constant columns are only centered and reported in
    ``constant_columns``. Targets are left untouched.
    """
    X = dataset.X
    mean = X.mean(axis=0)
    centered = X - mean
    # exact test: a rounded mean leaves a nonzero std on constant columns
    flat = np.ptp(X, axis=0) == 0.0
    constant = tuple(int(i) for i in np.flatnonzero(flat))
    if constant:
        logger.info("standardize: constant input columns %s", list(constant))
    centered[:, flat] = 0.0
    std = np.sqrt(np.mean(centered * centered, axis=0))
    scale = np.where(flat, 1.0, std)
    return Dataset(X=centered / scale, Y=dataset.Y.copy(), constant_columns=constant)


class CsvSource(DatasetSource):
    """Dataset read from a CSV file."""

    def __init__(
        self, path: Union[str, Path], d_in: int, d_out: int, header: bool = False
    ):
        require_count("d_in", d_in)
        require_count("d_out", d_out)
        self.path = Path(path)
        self.d_in, self.d_out, self.header = d_in, d_out, header

    def generate(self, rng: np.random.Generator) -> Dataset:
        return load_csv(self.path, self.d_in, self.d_out, self.header)

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "csv",
            "path": str(self.path),
            "d_in": self.d_in,
            "d_out": self.d_out,
            "header": self.header,
        }
