"""Tests for data models."""

import math

import numpy as np
import pytest

from eoslab.data.models import (
    BifurcationDiagram,
    Dataset,
    FunctionState,
    GridSpec,
    NetworkConfig,
    PhaseDiagram,
    PhaseDiagramCell,
    Region,
    Termination,
    TrainLog,
    Trajectory,
    UVHyper,
    UVParams,
)


class TestUVHyper:
    """Tests for UVHyper."""

    def test_k_depends_on_geometry_only(self):
        """k = x_norm / sqrt(n_eff)."""
        assert UVHyper(eta=0.1, x_norm=2.0, n_eff=4.0, y=1.0).k == pytest.approx(1.0)
        assert UVHyper(eta=0.1, x_norm=3.0, n_eff=1.0, y=1.0).k == pytest.approx(3.0)

    def test_with_eta_returns_copy(self):
        """with_eta leaves the original untouched."""
        hyper = UVHyper(eta=0.1, x_norm=1.0, n_eff=1.0, y=2.0)
        other = hyper.with_eta(0.7)
        assert other.eta == 0.7
        assert hyper.eta == 0.1
        assert other.y == hyper.y


class TestFunctionState:
    """Tests for FunctionState conversions."""

    def test_array_round_trip(self):
        """Test conversion to and from a numpy array."""
        state = FunctionState(-1.5, 3.0)
        assert np.array_equal(state.as_array(), np.array([-1.5, 3.0]))
        assert FunctionState.from_array([-1.5, 3.0]) == state


def test_uv_params_effective_width():
    """n_eff = n^(1-p) interpolates NTP and muP."""
    U = np.zeros((16, 3))
    v = np.zeros(16)
    assert UVParams(U, v, n=16, p=0.0, sigma_w2=1.0).n_eff == pytest.approx(16.0)
    assert UVParams(U, v, n=16, p=1.0, sigma_w2=1.0).n_eff == pytest.approx(1.0)
    assert UVParams(U, v, n=16, p=0.5, sigma_w2=1.0).n_eff == pytest.approx(4.0)
    assert UVParams(U, v, n=16, p=0.5, sigma_w2=1.0).d_in == 3


class TestTrajectory:
    """Tests for Trajectory rows and properties."""

    def _trajectory(self, terminated=Termination.COMPLETED, diverged_at=None):
        return Trajectory(
            delta_f=np.array([-2.0, -1.0]),
            lam=np.array([1.0, 2.0]),
            betas=np.array([0.5, 0.0]),
            losses=np.array([2.0, 0.5]),
            terminated=terminated,
            diverged_at=diverged_at,
        )

    def test_rows_start_at_step_zero(self):
        """Test that rows are numbered from the initial state."""
        rows = self._trajectory().to_rows()
        assert rows == [(0, -2.0, 1.0, 0.5, 2.0), (1, -1.0, 2.0, 0.0, 0.5)]

    def test_final_and_states(self):
        """Test the final state and the list of recorded states."""
        trajectory = self._trajectory()
        assert len(trajectory) == 2
        assert trajectory.final == FunctionState(-1.0, 2.0)
        assert trajectory.states[0] == FunctionState(-2.0, 1.0)
        assert not trajectory.diverged

    def test_diverged_flag(self):
        """Test that a diverged termination sets the flag."""
        trajectory = self._trajectory(Termination.DIVERGED, diverged_at=1)
        assert trajectory.diverged
        assert trajectory.diverged_at == 1


def test_grid_spec_centers_are_cell_centered():
    """Centers sit in the middle of equal cells."""
    spec = GridSpec(df_range=(-3.0, 1.0), lam_range=(-1.0, 3.0), resolution=2)
    df, lam = spec.centers()
    assert np.allclose(df, [-2.0, 0.0])
    assert np.allclose(lam, [0.0, 2.0])


def test_bifurcation_diagram_summary_and_rows():
    """Rows are long-form and the summary labels aperiodic values."""
    diagram = BifurcationDiagram(
        map_kind="manifold",
        etas=np.array([0.4, 0.6, 1.2]),
        values=[np.array([4.0, 4.0]), np.array([3.0, 5.0]), np.empty(0)],
        diverged=np.array([False, False, True]),
        periods=[1, None, None],
        bin_tol=1e-6,
    )
    assert diagram.to_rows() == [(0.4, 4.0), (0.4, 4.0), (0.6, 3.0), (0.6, 5.0)]
    assert diagram.distinct_values(0).tolist() == [4.0]
    assert diagram.first_divergence() == pytest.approx(1.2)
    summary = diagram.summary()
    assert summary[0] == {"eta": 0.4, "period": 1, "diverged": False}
    assert summary[1]["period"] == "aperiodic"
    assert summary[2] == {"eta": 1.2, "period": None, "diverged": True}


def test_network_config_overrides():
    """Test that overrides return a modified copy."""
    config = NetworkConfig(depth=3, width=8)
    changed = config.with_overrides(sigma_w2=2.0)
    assert changed.sigma_w2 == 2.0
    assert config.sigma_w2 == 1.0
    assert changed.depth == 3


def test_train_log_rows_leave_unsampled_steps_empty():
    """Steps without a sharpness sample carry None in the measured columns."""
    log = TrainLog(
        eta=0.1,
        lambda0=2.0,
        losses=np.array([1.0, 0.5, 0.25]),
        sharpness_steps=np.array([0, 2]),
        sharpness=np.array([2.0, 3.0]),
        sharpness_converged=np.array([True, True]),
        weight_norm_total=np.array([5.0, 5.0]),
        weight_norm_layers=np.array([[3.0, 4.0], [4.0, 3.0]]),
    )
    rows = log.to_rows()
    assert rows[0] == (0, 1.0, 2.0, 5.0, 3.0, 4.0)
    assert rows[1] == (1, 0.5, None, None, None, None)
    assert rows[2] == (2, 0.25, 3.0, 5.0, 4.0, 3.0)
    assert not log.diverged


def test_dataset_shape_properties():
    """Test size and dimension properties of a dataset."""
    data = Dataset(X=np.ones((4, 3)), Y=np.zeros((4, 2)))
    assert (data.size, data.d_in, data.d_out) == (4, 3, 2)
    assert data.to_rows()[0] == (1.0, 1.0, 1.0, 0.0, 0.0)


def test_phase_diagram_grid_masks_diverged_cells():
    """Diverged cells appear as NaN in the value grid."""
    cells = [
        PhaseDiagramCell(1.0, 0.5, 0.1, 4.0, 0.2, False),
        PhaseDiagramCell(1.0, 2.0, 0.4, math.nan, math.nan, True),
        PhaseDiagramCell(2.0, 0.5, 0.1, 8.0, 0.4, False),
        PhaseDiagramCell(2.0, 2.0, 0.4, 5.0, 1.0, False),
    ]
    diagram = PhaseDiagram(axis1_name="sigma_w2", cells=cells)
    axis1, cs, values = diagram.grid()
    assert axis1.tolist() == [1.0, 2.0]
    assert cs.tolist() == [0.5, 2.0]
    assert values[0, 0] == pytest.approx(0.2)
    assert math.isnan(values[0, 1])
    assert values[1, 1] == pytest.approx(1.0)
    assert diagram.to_rows()[1][3] is True


def test_region_values():
    """Test the string values of portrait regions."""
    assert [r.value for r in Region] == ["forbidden", "divergent", "sharpening", "reduction"]
