"""Tests for fixed points, Jacobians and stability."""

import numpy as np
import pytest

from eoslab.data.models import FixedPointKind, FunctionState, Stability, UVHyper
from eoslab.data.validator import ValidationError
from eoslab.dynamics.fixed_points import (
    classify_stability,
    critical_rates,
    eig2,
    eos_condition,
    fixed_points,
    jacobian_analytic,
    jacobian_numeric,
    line_lambda_min,
    line_point,
)
from eoslab.dynamics.uv import step_function_space

HYPER = UVHyper(eta=0.5, x_norm=1.0, n_eff=1.0, y=2.0)


class TestCriticalRates:
    """Tests for critical learning rates."""

    def test_positive_target(self):
        """Test the critical rates for a positive target."""
        rates = critical_rates(x_norm=1.0, n_eff=1.0, y=2.0)
        assert rates.eta_c == pytest.approx(0.5)
        assert rates.eta_upper == pytest.approx(1.0)
        assert rates.eta_max_y0 is None

    def test_width_scaling(self):
        """Test that the rates grow with sqrt(n_eff)."""
        assert critical_rates(x_norm=1.0, n_eff=4.0, y=2.0).eta_c == pytest.approx(1.0)

    def test_zero_target_needs_lambda0(self):
        """Test that y = 0 needs lambda0 for the maximum rate."""
        rates = critical_rates(1.0, 1.0, 0.0, lambda0_for_y0=2.0)
        assert rates.eta_c is None
        assert rates.eta_max_y0 == pytest.approx(2.0)
        with pytest.raises(ValidationError, match="lambda0_for_y0"):
            critical_rates(1.0, 1.0, 0.0)

    def test_negative_target_rejected(self):
        """Test that a negative target is rejected."""
        with pytest.raises(ValidationError, match="y: must be non-negative"):
            critical_rates(1.0, 1.0, -1.0)

    def test_eos_condition(self):
        """lam0 < c k y is eta = c / lam0 > eta_c."""
        assert eos_condition(c=2.0, lam0=3.0, hyper=HYPER)
        assert not eos_condition(c=1.0, lam0=3.0, hyper=HYPER)


def test_line_lambda_min():
    """Test the lower end of the line of minima."""
    assert line_lambda_min(HYPER) == pytest.approx(4.0)
    assert line_lambda_min(UVHyper(0.5, 1.0, 1.0, -2.0)) == pytest.approx(4.0)


class TestFixedPoints:
    """Tests for the closed-form fixed-point report."""

    def test_locations(self):
        """Test the locations of the isolated fixed points."""
        reports = fixed_points(HYPER, line_lambda=5.0)
        kinds = [r.kind for r in reports]
        assert kinds == [
            FixedPointKind.LINE,
            FixedPointKind.ORIGIN,
            FixedPointKind.LEFT,
            FixedPointKind.RIGHT,
        ]
        locations = [(r.location.delta_f, r.location.lam) for r in reports]
        assert locations == [(0.0, 5.0), (-2.0, 0.0), (-4.0, 4.0), (4.0, 12.0)]

    def test_points_are_fixed(self):
        """Test that every reported point is mapped to itself."""
        for report in fixed_points(HYPER, line_lambda=5.0):
            image = step_function_space(report.location, HYPER)
            assert abs(image.delta_f - report.location.delta_f) <= 1e-12
            assert abs(image.lam - report.location.lam) <= 1e-12

    def test_eigenvalues_and_stability(self):
        """Test eigenvalues and stability classes."""
        _, origin, left, right = fixed_points(HYPER, line_lambda=5.0)
        assert origin.eigenvalues == pytest.approx((0.0, 4.0))
        assert origin.stability is Stability.SADDLE
        assert left.eigenvalues == pytest.approx((9.0, 3.0))
        assert left.stability is Stability.UNSTABLE
        assert right.eigenvalues == pytest.approx((9.0, 7.0))
        assert right.stability is Stability.UNSTABLE

    @pytest.mark.parametrize("index", [1, 2, 3])
    def test_numeric_jacobian_matches_closed_form(self, index):
        """Test numeric Jacobian eigenvalues against closed forms."""
        report = fixed_points(HYPER, line_lambda=5.0)[index]
        jac = jacobian_numeric(report.location, HYPER)
        values = sorted(np.linalg.eigvals(jac).real)
        assert values == pytest.approx(sorted(report.eigenvalues), abs=1e-6)

    @pytest.mark.parametrize("index", [1, 2, 3])
    def test_eigenvectors(self, index):
        """J w = mu w for every reported pair."""
        report = fixed_points(HYPER, line_lambda=5.0)[index]
        jac = jacobian_analytic(report.location, HYPER)
        for value, vector in zip(report.eigenvalues, report.eigenvectors):
            assert np.allclose(jac @ vector, value * vector, atol=1e-12)

    def test_line_point_stability(self):
        """Points of line I are stable iff eta lam < 2, excluding the marginal end."""
        assert line_point(HYPER, 3.0).stability is Stability.STABLE
        assert line_point(HYPER, 5.0).stability is Stability.UNSTABLE
        assert line_point(HYPER, 4.0).stability is Stability.MARGINAL
        assert line_point(HYPER, 5.0).eigenvalues == pytest.approx((1.0, -1.5))

    def test_line_lambda_below_bound(self):
        """Test that line points below the bound are rejected."""
        with pytest.raises(ValidationError, match="line_lambda"):
            fixed_points(HYPER, line_lambda=1.0)

    def test_zero_target_merges_origin(self):
        """Test that y = 0 merges point II into the line."""
        hyper = UVHyper(eta=0.5, x_norm=1.0, n_eff=1.0, y=0.0)
        reports = fixed_points(hyper, line_lambda=1.0)
        assert reports[1].merged_into_line
        assert reports[1].location == FunctionState(-0.0, 0.0)

    def test_above_upper_flag(self):
        """Test the flag for eta above the divergence rate."""
        reports = fixed_points(HYPER.with_eta(1.2), line_lambda=5.0)
        assert all(r.above_upper for r in reports)
        assert not any(r.above_upper for r in fixed_points(HYPER, line_lambda=5.0))

    def test_report_to_dict(self):
        """Test the JSON form of a report."""
        report = fixed_points(HYPER, line_lambda=5.0)[2]
        document = report.to_dict()
        assert document["kind"] == "III"
        assert document["delta_f"] == -4.0
        assert document["lambda"] == 4.0
        assert document["eig"] == [9.0, 3.0]
        assert document["stability"] == "unstable"


class TestJacobian:
    """Tests for the analytic and numeric Jacobians."""

    @pytest.mark.parametrize("seed", range(5))
    def test_numeric_matches_analytic(self, seed):
        """Test that the numeric Jacobian matches the analytic one."""
        rng = np.random.default_rng(seed)
        state = FunctionState(float(rng.uniform(-3, 3)), float(rng.uniform(0, 8)))
        hyper = UVHyper(eta=float(rng.uniform(0.1, 1.0)), x_norm=1.2, n_eff=2.0, y=1.5)
        assert np.allclose(
            jacobian_numeric(state, hyper), jacobian_analytic(state, hyper), atol=1e-6
        )

    def test_rel_step_range(self):
        """Test that the relative step must be in range."""
        with pytest.raises(ValidationError, match="rel_step"):
            jacobian_numeric(FunctionState(0.0, 1.0), HYPER, rel_step=0.1)


class TestEig2:
    """Tests for 2x2 eigen-decomposition."""

    def test_real_descending(self):
        """Test that real eigenvalues come in descending order."""
        first, second = eig2(np.array([[2.0, 0.0], [0.0, 5.0]]))
        assert first.value == 5.0
        assert second.value == 2.0
        assert np.allclose(first.vector, [0.0, 1.0])
        assert np.allclose(second.vector, [1.0, 0.0])

    def test_vectors_satisfy_definition(self):
        """Test that eigenvectors satisfy A v = mu v."""
        matrix = np.array([[9.0, 2.0], [8.0, 5.0]])
        for pair in eig2(matrix):
            assert np.allclose(matrix @ pair.vector, pair.value.real * pair.vector)
            assert np.linalg.norm(pair.vector) == pytest.approx(1.0)

    def test_complex_pair(self):
        """Test a complex-conjugate pair without eigenvectors."""
        first, second = eig2(np.array([[0.0, -1.0], [1.0, 0.0]]))
        assert first.is_complex and second.is_complex
        assert first.vector is None
        assert first.magnitude == pytest.approx(1.0)

    def test_identity(self):
        """Test the degenerate identity matrix."""
        first, second = eig2(np.eye(2))
        assert first.value == second.value == 1.0
        assert first.vector is not None and second.vector is not None

    def test_rejects_non_finite(self):
        """Test that non-finite matrices are rejected."""
        with pytest.raises(ValidationError):
            eig2(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_classify_stability():
    """Test stability classes from eigenvalue magnitudes."""
    assert classify_stability((0.5, 0.2)) is Stability.STABLE
    assert classify_stability((1.5, 2.0)) is Stability.UNSTABLE
    assert classify_stability((0.5, 2.0)) is Stability.SADDLE
    assert classify_stability((1.0 + 1e-12, 0.2)) is Stability.MARGINAL
