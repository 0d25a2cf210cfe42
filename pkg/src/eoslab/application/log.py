"""Logging setup for command-line runs."""

import logging
import os
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

LOG_LEVEL_ENV = "EOSLAB_LOG_LEVEL"
_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def resolve_level(verbosity: int, env_level: Optional[str] = None) -> int:
    """Log level from -v count, falling back to EOSLAB_LOG_LEVEL when no -v is given.

    Args:
        verbosity: Number of -v flags (0 warning, 1 info, 2+ debug)
        env_level: Level name override; read from the environment when None

    Returns:
        A logging level.
    """
    if verbosity > 0:
        return _LEVELS.get(verbosity, logging.DEBUG)
    name = env_level if env_level is not None else os.getenv(LOG_LEVEL_ENV)
    if name:
        level = logging.getLevelName(name.strip().upper())
        if isinstance(level, int):
            return level
    return logging.WARNING


def configure_logging(verbosity: int = 0) -> logging.Logger:
    """Install a single rich handler on the package logger, writing to stderr.

    Repeated calls replace the handler instead of stacking them.
    """
    logger = logging.getLogger("eoslab")
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=False,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(resolve_level(verbosity))
    logger.propagate = False
    return logger
