"""Abstract base class for dataset sources.

Provides a unified interface for generated and file-backed datasets.
"""

from abc import ABC, abstractmethod
from typing import Any

import numpy as np

from eoslab.data.models import Dataset
from eoslab.data.validator import ValidationError


class DatasetFormatError(ValidationError):
    """Raised when a dataset file or dataset spec string is malformed."""

    pass


class DatasetSource(ABC):
    """Abstract base class for dataset sources.

    Subclasses should:
    1. Accept their parameters in the constructor and validate them there
    2. Implement generate() to build the Dataset from a seeded generator
    3. Implement describe() to report their parameters for config sidecars
    """

    @abstractmethod
    def generate(self, rng: np.random.Generator) -> Dataset:
        """Build the dataset.

        Args:
            rng: Seeded generator; sources that read files ignore it

        Returns:
            Dataset instance.

        Raises:
            NotImplementedError: Must be implemented by subclasses.
        """
        pass

    @abstractmethod
    def describe(self) -> dict[str, Any]:
        """JSON-ready description of the source and its parameters.

        Raises:
            NotImplementedError: Must be implemented by subclasses.
        """
        pass
