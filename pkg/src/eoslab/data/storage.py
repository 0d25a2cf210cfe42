"""File storage for experiment outputs with atomic writes."""

import csv
import json
import logging
import os
import tempfile
from collections.abc import Iterable, Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Any, Optional

from eoslab.data.schema import create_output_directory, format_cell, sidecar_path

logger = logging.getLogger(__name__)


class OutputStore:
    """Writes CSV tables and JSON documents next to one primary output.

    Provides:
    - Atomic writes (temporary file renamed on success, removed on error)
    - Sidecar files derived from the primary output's stem
    - Automatic directory creation
    """

    def __init__(self, path: Path):
        """Initialize store for a primary output path.

        Args:
            path: Primary output file. Sidecars are written next to it.
        """
        self._path = Path(path)
        self._written: list[Path] = []
        create_output_directory(self._path)

    @property
    def path(self) -> Path:
        """Primary output path."""
        return self._path

    @property
    def written(self) -> list[Path]:
        """Paths written so far, in order."""
        return list(self._written)

    def sidecar(self, suffix: str) -> Path:
        """Path of a sidecar file, e.g. ``sidecar("nullclines.csv")``."""
        return sidecar_path(self._path, suffix)

    @contextmanager
    def transaction(self, target: Path) -> Iterator[IO[str]]:
        """Context manager for an atomic text write.

        Yields a handle to a temporary file in the target's directory. The
        file replaces ``target`` on success and is removed on exception.

        Example:
            with store.transaction(path) as handle:
                handle.write("...")
        """
        create_output_directory(target)
        fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
        try:
            with os.fdopen(fd, "w", newline="", encoding="utf-8") as handle:
                yield handle
            os.replace(tmp_name, target)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
        self._written.append(target)
        logger.debug("wrote %s", target)

    def write_csv(
        self,
        columns: Sequence[str],
        rows: Iterable[Sequence[Any]],
        target: Optional[Path] = None,
    ) -> Path:
        """Write a CSV table with a header row.

        Args:
            columns: Header names
            rows: Row tuples; cells are formatted by ``format_cell``
            target: Destination, defaults to the primary path

        Returns:
            Path written.
        """
        target = target or self._path
        with self.transaction(target) as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_cell(value) for value in row])
        return target

    def write_json(self, document: Any, target: Optional[Path] = None) -> Path:
        """Write a JSON document with sorted keys and a trailing newline."""
        target = target or self._path
        with self.transaction(target) as handle:
            json.dump(document, handle, indent=2, sort_keys=True, allow_nan=True)
            handle.write("\n")
        return target

    def write_config(self, config: dict[str, Any]) -> Path:
        """Write the resolved configuration sidecar ``<stem>.config.json``."""
        return self.write_json(config, self.sidecar("config.json"))
