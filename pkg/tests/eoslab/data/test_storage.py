"""Tests for output storage."""

import csv
import json

import pytest

from eoslab.data.storage import OutputStore


class TestOutputStore:
    """Tests for OutputStore."""

    def test_creates_parent_directories(self, tmp_path):
        """Test that missing parent directories are created."""
        target = tmp_path / "nested" / "deeper" / "run.csv"
        store = OutputStore(target)
        store.write_csv(("a", "b"), [(1, 2.5)])
        assert target.exists()

    def test_write_csv(self, tmp_path):
        """Test writing a header and rows."""
        store = OutputStore(tmp_path / "run.csv")
        path = store.write_csv(("t", "value", "flag"), [(0, 0.1, True), (1, None, False)])

        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows == [["t", "value", "flag"], ["0", "0.1", "true"], ["1", "", "false"]]

    def test_write_json_sorted(self, tmp_path):
        """Test that JSON documents are written with sorted keys."""
        store = OutputStore(tmp_path / "report.json")
        path = store.write_json({"b": 1, "a": [1.5]})
        text = path.read_text()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1.5], "b": 1}

    def test_sidecars_and_written_order(self, tmp_path):
        """Test sidecar paths and the order of written files."""
        store = OutputStore(tmp_path / "run.csv")
        store.write_csv(("a",), [(1,)])
        store.write_config({"command": "train"})
        assert store.written == [tmp_path / "run.csv", tmp_path / "run.config.json"]
        assert json.loads((tmp_path / "run.config.json").read_text()) == {"command": "train"}

    def test_failed_transaction_leaves_no_file(self, tmp_path):
        """An exception inside a write removes the temporary file."""
        target = tmp_path / "run.csv"
        store = OutputStore(target)

        def rows():
            yield (1,)
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError, match="boom"):
            store.write_csv(("a",), rows())

        assert not target.exists()
        assert list(tmp_path.iterdir()) == []
        assert store.written == []

    def test_failed_rewrite_keeps_previous_file(self, tmp_path):
        """Test that a failed write leaves the previous file intact."""
        target = tmp_path / "run.csv"
        store = OutputStore(target)
        store.write_csv(("a",), [(1,)])

        with pytest.raises(ValueError):
            with store.transaction(target) as handle:
                handle.write("partial")
                raise ValueError("stop")

        assert target.read_text() == "a\n1\n"
