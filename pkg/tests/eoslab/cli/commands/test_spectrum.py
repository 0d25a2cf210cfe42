"""Tests for CLI spectrum and dataset commands."""

import csv

import pytest
from click.testing import CliRunner

from eoslab.cli.main import cli


def _read(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_spectrum_of_training_log(tmp_path):
    """Test the spectrum of a logged sharpness column."""
    log = tmp_path / "log.csv"
    log.write_text("step,sharpness\n" + "".join(f"{t},{(-1) ** t}\n" for t in range(16)))
    out = tmp_path / "spec.csv"

    result = CliRunner().invoke(cli, ["spectrum", "--input", str(log), "--out", str(out)])

    assert result.exit_code == 0, result.output
    assert "over 16 values" in result.output
    rows = _read(out)
    assert len(rows) == 1 + 16
    assert float(rows[1 + 8][1]) == pytest.approx(1.0)


def test_spectrum_requires_input():
    """Test that a missing --input is a usage error."""
    result = CliRunner().invoke(cli, ["spectrum"])
    assert result.exit_code == 1
    assert "--input" in result.output


def test_spectrum_unknown_column(tmp_path):
    """Test that an unknown column exits with status 1."""
    log = tmp_path / "log.csv"
    log.write_text("step,loss\n0,1\n1,2\n")
    result = CliRunner().invoke(
        cli, ["spectrum", "--input", str(log), "--out", str(tmp_path / "s.csv")]
    )
    assert result.exit_code == 1
    assert "no column 'sharpness'" in result.output


def test_spectrum_non_finite_exits_2(tmp_path):
    """Test that a diverged log exits with status 2."""
    log = tmp_path / "log.csv"
    log.write_text("step,sharpness\n0,1\n1,nan\n")
    result = CliRunner().invoke(
        cli, ["spectrum", "--input", str(log), "--out", str(tmp_path / "s.csv")]
    )
    assert result.exit_code == 2


def test_dataset_writes_examples(tmp_path):
    """Test dataset generation with standardized inputs."""
    out = tmp_path / "data.csv"
    result = CliRunner().invoke(
        cli, ["dataset", "--dataset", "power-law:8,3,1,1,0.5", "--standardize", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    rows = _read(out)
    assert rows[0] == ["x_1", "x_2", "x_3", "y_1"]
    assert len(rows) == 1 + 8
    assert "8 examples" in result.output


def test_dataset_unknown_kind_exits_1(tmp_path):
    """Test that an unknown dataset kind exits with status 1."""
    result = CliRunner().invoke(
        cli, ["dataset", "--dataset", "mnist:10", "--out", str(tmp_path / "d.csv")]
    )
    assert result.exit_code == 1
    assert "unknown kind" in result.output
