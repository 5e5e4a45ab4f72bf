"""Tests for the direct fitters, the Levenberg-Marquardt fits and the fitter registry."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import exact_points
from src.conic import ConicClass, GeometricEllipse, algebraic_to_geometric, canonicalize, classify_conic
from src.distance import confocal_distances
from src.errors import ConfigError, DegenerateInput, InitializationFailed, InsufficientPoints
from src.fitters import (
    ALL_FITTERS,
    ELLIPSE_FITTERS,
    FitStatus,
    LMConfig,
    closed_form_result,
    data_extent,
    fit_circle_lm,
    fit_confocal_lm,
    fit_halir,
    fit_halir_conic,
    fit_kasa_circle,
    fit_taubin,
    get_fitter,
    levenberg_marquardt,
)

HEXAGON = np.column_stack((np.cos(np.arange(6) * math.pi / 3), np.sin(np.arange(6) * math.pi / 3)))
DIAGONAL_LINE = np.column_stack((np.arange(10.0), np.arange(10.0)))

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _assert_rho_close(actual: GeometricEllipse, expected: GeometricEllipse, rtol: float) -> None:
    actual, expected = canonicalize(actual), canonicalize(expected)
    scale = np.abs(expected.as_array()) + 1.0
    assert np.all(np.abs(actual.as_array() - expected.as_array()) <= rtol * scale), (actual, expected)


def _moved(points: np.ndarray, angle: float, shift) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return points @ np.array([[c, -s], [s, c]]).T + np.asarray(shift)


# ---------------------------------------------------------------------------
# Halir
# ---------------------------------------------------------------------------


class TestHalir:
    def test_recovers_exact_ellipse(self, reference_rho):
        _assert_rho_close(fit_halir(exact_points(reference_rho)), reference_rho, 1e-6)

    def test_hexagon_gives_unit_circle(self):
        rho = fit_halir(HEXAGON)
        assert rho.as_array()[:4] == pytest.approx([0.0, 0.0, 1.0, 1.0], abs=1e-9)

    def test_collinear_points_are_degenerate(self):
        with pytest.raises(DegenerateInput):
            fit_halir(DIAGONAL_LINE)

    def test_needs_six_points(self):
        with pytest.raises(InsufficientPoints, match="insufficient points"):
            fit_halir(HEXAGON[:5])

    def test_noisy_arc_is_still_an_ellipse(self, rng, reference_rho):
        points = exact_points(reference_rho, 40, 0.0, math.pi / 2) + rng.normal(0, 3.0, size=(40, 2))
        conic = fit_halir_conic(points)
        assert classify_conic(conic) is ConicClass.ELLIPSE


# ---------------------------------------------------------------------------
# Taubin
# ---------------------------------------------------------------------------


class TestTaubin:
    def test_recovers_exact_ellipse(self, reference_rho):
        conic = fit_taubin(exact_points(reference_rho))
        assert classify_conic(conic) is ConicClass.ELLIPSE
        _assert_rho_close(algebraic_to_geometric(conic), reference_rho, 1e-6)

    def test_hexagon_gives_unit_circle_conic(self):
        tau = fit_taubin(HEXAGON).as_array()
        np.testing.assert_allclose(tau, np.array([1, 0, 1, 0, 0, -1]) / math.sqrt(3), atol=1e-9)

    def test_collinear_points_are_degenerate(self):
        with pytest.raises(DegenerateInput):
            fit_taubin(DIAGONAL_LINE)

    def test_result_is_normalized(self, reference_rho):
        tau = fit_taubin(exact_points(reference_rho))
        assert np.linalg.norm(tau.as_array()) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Kasa circle
# ---------------------------------------------------------------------------


class TestKasa:
    def test_exact_circle(self):
        rho = GeometricEllipse(2.0, -1.0, 7.0, 7.0, 0.0)
        fitted = fit_kasa_circle(exact_points(rho, 12))
        assert fitted.as_array() == pytest.approx(rho.as_array(), abs=1e-9)

    def test_collinear_points(self):
        with pytest.raises(DegenerateInput):
            fit_kasa_circle(DIAGONAL_LINE)


# ---------------------------------------------------------------------------
# Levenberg-Marquardt
# ---------------------------------------------------------------------------


class TestLMConfig:
    def test_defaults(self):
        config = LMConfig()
        assert (config.lambda0, config.nu0, config.gamma, config.max_iters) == (0.5, 10.0, 3.0, 50)
        assert config.max_extent_ratio == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [{"lambda0": 0.0}, {"nu0": 1.0}, {"gamma": 0.5}, {"max_iters": 0}, {"rel_tol": -1.0}, {"max_extent_ratio": 0.0}],
    )
    def test_invalid_values(self, kwargs):
        with pytest.raises(ConfigError):
            LMConfig(**kwargs)


class TestLevenbergMarquardt:
    def test_linear_least_squares(self):
        # Residuals r = A p - y; LM must land on the normal-equation solution
        A = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
        y = np.array([1.0, 2.0, 4.0])
        expected = np.linalg.lstsq(A, y, rcond=None)[0]

        def system(p):
            return A @ p - y, A

        params, iterations, sd, status, history = levenberg_marquardt(
            np.zeros(2), system, lambda p: p, LMConfig(max_iters=200)
        )
        assert params == pytest.approx(expected, abs=1e-8)
        assert status is FitStatus.CONVERGED
        assert list(history) == sorted(history, reverse=True)

    def test_zero_residual_start(self):
        def system(p):
            return np.zeros(3), np.ones((3, 1))

        params, iterations, sd, status, _ = levenberg_marquardt(np.ones(1), system, lambda p: p, LMConfig())
        assert status is FitStatus.INITIAL_WAS_OPTIMAL
        assert iterations == 0

    def test_non_finite_start(self):
        def system(p):
            return np.array([math.nan]), np.ones((1, 1))

        with pytest.raises(InitializationFailed):
            levenberg_marquardt(np.ones(1), system, lambda p: p, LMConfig())


class TestConfocalLM:
    def test_exact_points_from_truth(self, reference_rho):
        result = fit_confocal_lm(exact_points(reference_rho), LMConfig(), init=reference_rho)
        assert result.status in (FitStatus.INITIAL_WAS_OPTIMAL, FitStatus.CONVERGED)
        assert result.final_sd <= 1e-18
        assert result.iterations <= 2

    def test_exact_points_from_halir(self, reference_rho):
        result = fit_confocal_lm(exact_points(reference_rho))
        _assert_rho_close(result.ellipse, reference_rho, 1e-6)

    def test_result_is_canonical(self, rng, reference_rho):
        points = exact_points(reference_rho, 60) + rng.normal(0, 1.0, size=(60, 2))
        assert fit_confocal_lm(points).ellipse.is_canonical

    def test_sd_history_never_increases(self, rng, reference_rho):
        points = exact_points(reference_rho, 60, 0.0, math.pi) + rng.normal(0, 1.0, size=(60, 2))
        result = fit_confocal_lm(points)
        history = np.array(result.sd_history)
        assert np.all(np.diff(history) <= 0)
        assert result.final_sd == history[-1]
        assert result.final_sd <= result.initial_sd

    def test_improves_on_halir(self, rng, reference_rho):
        points = exact_points(reference_rho, 80, 0.3, 4.0) + rng.normal(0, 1.5, size=(80, 2))
        halir_sd = closed_form_result(fit_halir(points), points).final_sd
        assert fit_confocal_lm(points).final_sd <= halir_sd

    def test_rigid_motion_equivariance(self, rng, reference_rho):
        points = exact_points(reference_rho, 60) + rng.normal(0, 0.5, size=(60, 2))
        base = fit_confocal_lm(points).ellipse
        angle, shift = 0.4, (10.0, -7.0)
        moved = fit_confocal_lm(_moved(points, angle, shift)).ellipse

        center = _moved(np.array([base.center]), angle, shift)[0]
        expected = canonicalize((center[0], center[1], base.a_e, base.b_e, base.theta + angle))
        _assert_rho_close(moved, expected, 1e-4)

    def test_needs_six_points(self):
        with pytest.raises(InsufficientPoints):
            fit_confocal_lm(HEXAGON[:5])

    def test_halir_failure_becomes_initialization_failure(self):
        with pytest.raises(InitializationFailed):
            fit_confocal_lm(DIAGONAL_LINE)

    def test_residuals_are_zero_at_the_fit(self, reference_rho):
        points = exact_points(reference_rho)
        result = fit_confocal_lm(points)
        assert np.max(confocal_distances(result.ellipse, points)) < 1e-6

    def test_extent_bound_holds_the_semi_major(self, reference_rho):
        # Full ellipse with a = 15: extent 30, so a ratio of 0.4 caps a at 12
        points = exact_points(reference_rho)
        small = GeometricEllipse(1.0, 3.0, 10.0, 8.0, math.pi / 6)
        bounded = fit_confocal_lm(points, LMConfig(max_extent_ratio=0.4), init=small)
        free = fit_confocal_lm(points, LMConfig(max_extent_ratio=math.inf), init=small)
        assert bounded.ellipse.a_e <= 12.0 + 1e-9
        assert bounded.final_sd > free.final_sd
        _assert_rho_close(free.ellipse, reference_rho, 1e-6)

    def test_extent_bound_never_below_the_start(self, reference_rho, rng):
        points = exact_points(reference_rho, 60, 0.0, math.pi / 2) + rng.normal(0, 1.0, size=(60, 2))
        start = fit_halir(points)
        result = fit_confocal_lm(points, LMConfig(max_extent_ratio=1e-3), init=start)
        assert result.ellipse.a_e <= start.a_e * (1.0 + 1e-12)
        assert result.final_sd <= result.initial_sd


def test_data_extent_is_rigid_motion_invariant():
    square = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
    assert data_extent(square) == pytest.approx(2.0 * math.sqrt(2.0))
    assert data_extent(_moved(square, 0.7, (5.0, -3.0))) == pytest.approx(2.0 * math.sqrt(2.0))


class TestCircleLM:
    def test_exact_circle(self):
        rho = GeometricEllipse(2.0, -1.0, 7.0, 7.0, 0.0)
        result = fit_circle_lm(exact_points(rho, 30))
        assert result.ellipse.as_array() == pytest.approx(rho.as_array(), abs=1e-10)
        assert result.ellipse.a_e == result.ellipse.b_e
        assert result.ellipse.theta == 0.0

    def test_three_points_interpolate(self):
        points = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]])
        result = fit_circle_lm(points)
        assert result.final_sd <= 1e-20
        assert result.ellipse.a_e == pytest.approx(2.5)

    def test_needs_three_points(self):
        with pytest.raises(InsufficientPoints):
            fit_circle_lm(HEXAGON[:2])


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


class TestRegistry:
    def test_names(self):
        assert set(ELLIPSE_FITTERS) == {"halir", "taubin", "confocal"}
        assert set(ALL_FITTERS) == {"halir", "taubin", "confocal", "circle"}

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            get_fitter("kanatani")

    @pytest.mark.parametrize("name", ["halir", "taubin", "confocal"])
    def test_every_fitter_recovers_exact_data(self, name, reference_rho):
        result = get_fitter(name)(exact_points(reference_rho), LMConfig())
        _assert_rho_close(result.ellipse, reference_rho, 1e-6)

    def test_closed_form_fitters_report_zero_iterations(self, reference_rho):
        result = get_fitter("halir")(exact_points(reference_rho), LMConfig())
        assert result.iterations == 0
        assert not get_fitter("halir").iterative
