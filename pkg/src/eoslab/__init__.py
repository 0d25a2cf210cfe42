"""Edge-of-stability laboratory - UV-model dynamics and network sharpness experiments."""

__version__ = "0.1.0"
