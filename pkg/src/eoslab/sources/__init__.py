"""Dataset sources for training experiments.

This package provides:
- Abstract base class for dataset sources
- Factory and spec-string parser for creating sources
- Synthetic generators and CSV ingestion
"""

from eoslab.sources.base import DatasetFormatError, DatasetSource
from eoslab.sources.factory import SourceFactory, create_source, get_factory, parse_dataset_spec
from eoslab.sources.synthetic import (
    make_power_law,
    make_random,
    make_single_example,
    make_teacher_student,
)
from eoslab.sources.tabular import load_csv, standardize

__all__ = [
    "DatasetFormatError",
    "DatasetSource",
    "SourceFactory",
    "create_source",
    "get_factory",
    "load_csv",
    "make_power_law",
    "make_random",
    "make_single_example",
    "make_teacher_student",
    "parse_dataset_spec",
    "standardize",
]
