"""Tests for the experiment runners."""

import csv
import json

import numpy as np
import pytest

from eoslab.application.experiments import (
    NumericDivergenceError,
    load_dataset,
    read_column,
    run_bifurcation,
    run_dataset,
    run_fixed_points,
    run_spectrum,
    run_train,
    run_uv_portrait,
    run_uv_trajectory,
)
from eoslab.data.models import FunctionState, GridSpec, NetworkConfig, Parameterization, UVHyper
from eoslab.data.validator import ValidationError
from eoslab.networks.curvature import PowerIterationSettings
from eoslab.networks.training import LearningRate
from eoslab.sources.synthetic import RandomSource, SingleExampleSource

CONFIG = {"command": "test", "options": {}}


def _rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def _hyper(eta=0.45, y=2.0):
    return UVHyper(eta=eta, x_norm=1.0, n_eff=1.0, y=y)


class TestUvRunners:
    """Tests for the UV-model runners."""

    def test_trajectory(self, tmp_path):
        """Test the trajectory table and its config sidecar."""
        out = tmp_path / "traj.csv"
        outcome = run_uv_trajectory(_hyper(), FunctionState(-2.0, 1.0), 10, 1e8, out, CONFIG)

        rows = _rows(out)
        assert rows[0] == ["t", "delta_f", "lambda", "beta", "loss"]
        assert len(rows) == 12
        assert outcome.paths == [out, tmp_path / "traj.config.json"]
        assert json.loads((tmp_path / "traj.config.json").read_text()) == CONFIG
        assert outcome.summary["status"] == "completed"
        assert not outcome.diverged

    def test_trajectory_divergence(self, tmp_path):
        """Test that a large learning rate is reported as diverged."""
        outcome = run_uv_trajectory(
            _hyper(eta=2.0), FunctionState(-2.0, 1.0), 1000, 1e8, tmp_path / "t.csv", CONFIG
        )
        assert outcome.diverged
        assert outcome.summary["status"] == "diverged"
        assert outcome.summary["diverged_at"] is not None

    def test_portrait(self, tmp_path):
        """Test the portrait table and nullcline sidecar."""
        out = tmp_path / "portrait.csv"
        outcome = run_uv_portrait(
            _hyper(), GridSpec((-4.0, 2.0), (0.0, 8.0), 3), 1, "lambda", 200, 1e8, out, CONFIG
        )
        assert outcome.paths == [
            out,
            tmp_path / "portrait.nullclines.csv",
            tmp_path / "portrait.config.json",
        ]
        assert len(_rows(out)) == 1 + 9
        assert _rows(tmp_path / "portrait.nullclines.csv")[0] == ["delta_f", "lambda", "curve"]
        assert outcome.summary["cells"] == 9
        assert sum(outcome.summary["regions"].values()) == 9

    def test_fixed_points(self, tmp_path):
        """Test the fixed-point report and critical rates."""
        out = tmp_path / "fp.json"
        outcome = run_fixed_points(_hyper(eta=0.5), None, out, CONFIG)
        reports = json.loads(out.read_text())
        assert [report["kind"] for report in reports] == ["I", "II", "III", "IV"]
        assert outcome.summary["eta_c"] == pytest.approx(0.5)
        assert outcome.summary["eta_upper"] == pytest.approx(1.0)
        assert outcome.summary["eta_2"] == pytest.approx(0.914214, abs=1e-6)

    def test_fixed_points_zero_target(self, tmp_path):
        """Test that y = 0 omits the critical rates."""
        outcome = run_fixed_points(_hyper(y=0.0), None, tmp_path / "fp.json", CONFIG)
        assert "eta_c" not in outcome.summary

    def test_bifurcation(self, tmp_path):
        """Test the bifurcation table and periods sidecar."""
        out = tmp_path / "bif.csv"
        outcome = run_bifurcation(
            "manifold",
            _hyper(),
            (0.3, 0.45),
            3,
            None,
            5000,
            64,
            1e-6,
            32,
            1e8,
            out,
            CONFIG,
        )
        assert _rows(out)[0] == ["eta", "lambda_value"]
        periods = json.loads((tmp_path / "bif.periods.json").read_text())
        assert [entry["period"] for entry in periods] == [1, 1, 1]
        assert outcome.summary["diverged"] == 0
        assert outcome.summary["first_divergence"] is None


class TestNetworkRunners:
    """Tests for dataset loading and training runners."""

    def test_load_dataset_is_seeded(self):
        """Test that the data stream depends only on the seed."""
        source = RandomSource(6, 3, 1)
        first = load_dataset(source, seed=3)
        again = load_dataset(source, seed=3)
        other = load_dataset(source, seed=4)
        assert np.array_equal(first.X, again.X)
        assert not np.array_equal(first.X, other.X)

    def test_load_dataset_preprocessing(self):
        """Test standardization followed by sp normalization."""
        network = NetworkConfig(depth=2, width=4, parameterization=Parameterization.SP)
        data = load_dataset(
            RandomSource(20, 3, 1), 0, network, standardize_inputs=True, normalize=True
        )
        assert np.linalg.norm(data.X, axis=1) == pytest.approx(np.full(20, np.sqrt(3.0)))

    def test_train(self, tmp_path):
        """Test training a UV-equivalent network on one example."""
        out = tmp_path / "train.csv"
        outcome = run_train(
            NetworkConfig(depth=2, width=16),
            SingleExampleSource(1.0, 2.0),
            LearningRate.constant(0.9),
            20,
            0,
            None,
            5,
            0,
            PowerIterationSettings(),
            float("inf"),
            False,
            False,
            out,
            CONFIG,
        )
        rows = _rows(out)
        assert len(rows) == 1 + 20
        assert rows[0][:3] == ["step", "loss", "sharpness"]
        config = json.loads((tmp_path / "train.config.json").read_text())
        assert config["dataset"] == {"kind": "single", "norm": 1.0, "y": 2.0, "dim": 1}
        assert outcome.summary["eta"] == pytest.approx(0.9 / outcome.summary["lambda0"])
        assert not outcome.diverged

    def test_dataset(self, tmp_path):
        """Test writing a generated dataset."""
        out = tmp_path / "data.csv"
        outcome = run_dataset(RandomSource(5, 2, 1), 0, False, out, CONFIG)
        rows = _rows(out)
        assert rows[0] == ["x_1", "x_2", "y_1"]
        assert len(rows) == 6
        assert outcome.summary["examples"] == 5


class TestSignalRunners:
    """Tests for reading logged series and the spectrum runner."""

    @pytest.fixture
    def log_path(self, tmp_path):
        path = tmp_path / "log.csv"
        lines = ["step,loss,sharpness"]
        for t in range(8):
            lines.append(f"{t},0.5,{1.0 if t % 2 == 0 else 3.0}")
        lines.append("8,0.5,")
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_read_column_by_name_and_index(self, log_path):
        """Test that names and 1-based indices select the same column."""
        by_name = read_column(log_path, "sharpness")
        assert by_name.tolist() == [1.0, 3.0] * 4
        assert np.array_equal(read_column(log_path, "3"), by_name)

    def test_read_column_errors(self, tmp_path, log_path):
        """Test missing columns, bad cells and non-finite values."""
        with pytest.raises(ValidationError, match="no column 'beta'"):
            read_column(log_path, "beta")
        bad = tmp_path / "bad.csv"
        bad.write_text("x\n1\nabc\n")
        with pytest.raises(ValidationError, match="not a number"):
            read_column(bad, "x")
        diverged = tmp_path / "diverged.csv"
        diverged.write_text("x\n1\ninf\n")
        with pytest.raises(NumericDivergenceError, match="non-finite"):
            read_column(diverged, "x")
        with pytest.raises(ValidationError, match="cannot read file"):
            read_column(tmp_path / "missing.csv", "x")

    def test_spectrum(self, tmp_path, log_path):
        """Test that a period-2 series puts all power at the Nyquist frequency."""
        out = tmp_path / "spectrum.csv"
        outcome = run_spectrum(log_path, "sharpness", None, True, out, CONFIG)
        rows = _rows(out)
        assert rows[0] == ["omega", "power"]
        assert len(rows) == 1 + 8
        assert float(rows[5][1]) == pytest.approx(1.0)
        assert outcome.summary["peak_omega"] == 4
        assert outcome.summary["total_power"] == pytest.approx(1.0)

    def test_spectrum_last(self, tmp_path, log_path):
        """Test that --last keeps only the trailing values."""
        outcome = run_spectrum(log_path, "sharpness", 4, False, tmp_path / "s.csv", CONFIG)
        assert outcome.summary["length"] == 4
