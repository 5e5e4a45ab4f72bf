"""Tests for the rasterizer, metrics, experiment file, result artifacts and benchmark harnesses."""

from __future__ import annotations

import dataclasses
import json
import logging
import math

import numpy as np
import pytest

from conftest import exact_points
from src.conic import GeometricEllipse, world_coordinates
from src.distance import project_points_oracle
from src.errors import ConfigError, EmptyInput, EmptyResult, FileAccessError, ParseError
from src.simulate import (
    BenchmarkRecord,
    FitSuite,
    ProgressLog,
    SimConfig,
    arc_mask,
    circumscribed_rect,
    fan_out,
    image_center,
    linear_r2,
    load_experiments,
    p_error,
    parse_numeric_rows,
    rasterize_ellipse,
    read_point_header,
    read_points,
    records_document,
    rmse,
    run_distance_benchmark,
    run_fit_benchmark,
    trial_rng,
    write_points,
    write_records_csv,
)
from src.simulate.experiments import EXPERIMENTS_PATH, parse_experiments
from src.simulate.records import CSV_COLUMNS

# ---------------------------------------------------------------------------
# Rasterizer
# ---------------------------------------------------------------------------


class TestCircumscribedRect:
    @pytest.mark.parametrize(
        "rho, expected",
        [
            ((1, 3, 15, 10, math.pi / 6), (-13, 15, -9, 15)),
            ((0, 0, 5, 3, 0), (-5, 5, -3, 3)),
            ((0.5, 0.5, 1, 1, 0), (-1, 2, -1, 2)),
        ],
    )
    def test_bounds(self, rho, expected):
        rect = circumscribed_rect(GeometricEllipse(*rho))
        assert (rect.x_min, rect.x_max, rect.y_min, rect.y_max) == expected

    def test_size(self):
        rect = circumscribed_rect(GeometricEllipse(0, 0, 5, 3, 0))
        assert (rect.width, rect.height) == (11, 7)


class TestSimConfig:
    def test_defaults_cover_full_ellipse(self, reference_rho):
        assert SimConfig(reference_rho).arc == pytest.approx(2 * math.pi)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha_s": 1.0, "alpha_f": 1.0},
            {"alpha_s": 0.0, "alpha_f": 7.0},
            {"alpha_f": math.nan},
            {"sigma": -0.1},
            {"sigma": math.inf},
        ],
    )
    def test_invalid(self, reference_rho, kwargs):
        with pytest.raises(ConfigError):
            SimConfig(reference_rho, **kwargs)

    def test_header_records_configuration(self, reference_rho):
        header = SimConfig(reference_rho, sigma=1.0, seed=9).header()
        assert header["seed"] == "9"
        assert [float(v) for v in header["rho"].split(",")] == list(reference_rho.as_array())


class TestArcMask:
    def test_wraps_past_two_pi(self):
        angle = np.array([0.1, 3.0, 6.2])
        np.testing.assert_array_equal(arc_mask(angle, 6.0, 6.0 + math.pi / 2), [True, False, True])

    def test_full_circle_keeps_everything(self):
        assert arc_mask(np.linspace(0, 6, 7), 1.0, 1.0 + 2 * math.pi).all()


class TestRasterize:
    def test_noise_free_pixels_satisfy_half_pixel_rule(self, reference_rho):
        pixels = rasterize_ellipse(SimConfig(reference_rho))
        proj = project_points_oracle(reference_rho, pixels)
        contacts = world_coordinates(reference_rho, proj.contact_x, proj.contact_y)
        assert len(pixels) > 50
        assert np.all(np.abs(pixels - contacts) <= 0.5 + 1e-9)
        np.testing.assert_array_equal(pixels, np.rint(pixels))

    def test_quarter_arc_stays_in_first_quadrant(self):
        pixels = rasterize_ellipse(SimConfig(GeometricEllipse(0, 0, 50, 50, 0), 0.0, math.pi / 2))
        assert len(pixels) > 0
        assert np.all(pixels >= 0)

    def test_noise_keeps_roughly_the_same_count(self, reference_rho):
        clean = rasterize_ellipse(SimConfig(reference_rho))
        noisy = rasterize_ellipse(SimConfig(reference_rho, sigma=1.0, seed=4))
        assert 0.5 * len(clean) <= len(noisy) <= 1.5 * len(clean)

    def test_seed_determinism(self, reference_rho):
        config = SimConfig(reference_rho, sigma=2.0, seed=17)
        np.testing.assert_array_equal(rasterize_ellipse(config), rasterize_ellipse(config))

    def test_explicit_generator_overrides_seed(self, reference_rho):
        config = SimConfig(reference_rho, sigma=2.0, seed=17)
        a = rasterize_ellipse(config, trial_rng(5, 1))
        b = rasterize_ellipse(config, trial_rng(5, 1))
        np.testing.assert_array_equal(a, b)

    def test_no_duplicate_pixels(self, reference_rho):
        pixels = rasterize_ellipse(SimConfig(reference_rho, sigma=3.0, seed=2))
        assert len(np.unique(pixels, axis=0)) == len(pixels)

    def test_empty_arc(self):
        # The four pixels around this tiny circle all have diagonal contacts
        config = SimConfig(GeometricEllipse(0.5, 0.5, 0.1, 0.1, 0.0), 0.1, 0.2)
        with pytest.raises(EmptyResult):
            rasterize_ellipse(config)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


class TestMetrics:
    def test_rmse_on_curve(self, reference_rho):
        assert rmse(reference_rho, exact_points(reference_rho)) == pytest.approx(0.0, abs=1e-9)

    def test_rmse_single_point(self, axis_rho):
        assert rmse(axis_rho, [(10.0, 0.0)]) == pytest.approx(5.0)

    def test_rmse_empty(self, axis_rho):
        with pytest.raises(EmptyInput):
            rmse(axis_rho, np.empty((0, 2)))

    def test_p_error_identity(self, axis_rho):
        assert p_error(axis_rho, axis_rho) == 0.0

    def test_p_error_value(self, axis_rho):
        est = GeometricEllipse(0, 0, 5.1, 3, 0)
        assert p_error(est, axis_rho) == pytest.approx(100 * 0.1 / math.sqrt(34), rel=1e-9)

    def test_p_error_swapped_axes(self, axis_rho):
        assert p_error(GeometricEllipse(0, 0, 3, 5, math.pi / 2), axis_rho) == pytest.approx(0.0, abs=1e-12)

    def test_p_error_theta_wraps(self):
        truth = GeometricEllipse(0, 0, 5, 3, 0.01)
        est = GeometricEllipse(0, 0, 5, 3, math.pi - 0.01)
        assert p_error(est, truth) == pytest.approx(100 * 0.02 / np.linalg.norm(truth.as_array()))

    def test_linear_r2(self):
        x = np.arange(10.0)
        assert linear_r2(x, 3 * x + 1) == pytest.approx(1.0)
        assert linear_r2(x, (x - 4.5) ** 2) < 0.1


# ---------------------------------------------------------------------------
# Experiment file
# ---------------------------------------------------------------------------


class TestExperiments:
    def test_shipped_values(self):
        experiments = load_experiments()
        assert experiments.distance.semi_minor == 50.0
        assert experiments.distance.arc == pytest.approx(math.pi / 2)
        assert experiments.overall.arcs == pytest.approx((2 * math.pi, 1.5 * math.pi, math.pi))
        assert experiments.sweep_base.theta == pytest.approx(math.pi / 4)
        assert experiments.lm.lambda0 == 0.5
        assert experiments.lm.max_extent_ratio == 1.0
        assert experiments.overall.arc_start == 0.0
        assert experiments.overall.image_size == 1024.0
        assert experiments.sweep_base.semi_minor == 80.0

    def test_noise_sweep_values(self):
        values = load_experiments().get_sweep("noise").values()
        assert len(values) == 21
        assert values[-1] == pytest.approx(5.0)

    def test_rotation_sweep_is_in_radians(self):
        values = load_experiments().get_sweep("rotation").values()
        assert values[-1] == pytest.approx(math.pi)

    def test_unknown_sweep(self):
        with pytest.raises(ConfigError, match="unknown sweep"):
            load_experiments().get_sweep("temperature")

    def test_missing_section(self):
        with pytest.raises(ConfigError, match="malformed"):
            parse_experiments({"distance": {}})

    def test_bad_lm_values(self):
        with open(EXPERIMENTS_PATH, encoding="utf-8") as f:
            data = json.load(f)
        data["lm"]["gamma"] = 0.1
        with pytest.raises(ConfigError):
            parse_experiments(data)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiments(tmp_path / "missing.json")


# ---------------------------------------------------------------------------
# Result and point files
# ---------------------------------------------------------------------------


class TestRecords:
    def test_statistics(self):
        record = BenchmarkRecord("s", "p", 1.0, "m", "q", np.arange(1.0, 21.0))
        assert (record.n, record.mean, record.median) == (20, 10.5, 10.5)
        assert record.p95 == pytest.approx(19.05)

    def test_empty_record_is_nan(self):
        record = BenchmarkRecord("s", "p", 1.0, "m", "q", failures=3)
        assert math.isnan(record.mean) and record.failures == 3

    def test_csv_layout(self, tmp_path):
        path = tmp_path / "out.csv"
        write_records_csv(path, [
            BenchmarkRecord("distance", "all", math.nan, "confocal", "abs-deviation", np.array([0.5])),
            BenchmarkRecord("distance", "all", math.nan, "sampson", "abs-deviation"),
        ])
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1] == "distance,all,nan,confocal,abs-deviation,1,0,0.5,0.5,0.5"
        assert lines[2].endswith(",0,0,nan,nan,nan")

    def test_json_document_uses_null(self):
        doc = records_document([BenchmarkRecord("a", "b", math.nan, "m", "q")], {"seed": 1})
        assert doc["schema"] == 1
        assert doc["records"][0]["mean"] is None
        assert doc["manifest"] == {"seed": 1}

    def test_point_file_round_trip(self, tmp_path, reference_rho):
        path = tmp_path / "points.txt"
        config = SimConfig(reference_rho, sigma=1.0, seed=3)
        points = rasterize_ellipse(config)
        write_points(path, points, config.header())
        np.testing.assert_array_equal(read_points(path), points)
        assert read_point_header(path)["seed"] == "3"

    def test_commas_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "points.txt"
        path.write_text("# source: scanner\n1, 2\n\n3\t4\n  5 ,6  \n")
        rows, header = parse_numeric_rows(path, 2)
        np.testing.assert_array_equal(rows, [[1, 2], [3, 4], [5, 6]])
        assert header == {"source": "scanner"}

    @pytest.mark.parametrize("text, line", [("1 2\n3\n", 2), ("1 2\n3 x\n", 2), ("nan 1\n", 1)])
    def test_parse_errors_carry_line_number(self, tmp_path, text, line):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(ParseError) as info:
            read_points(path)
        assert info.value.line_number == line

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileAccessError):
            read_points(tmp_path / "nope.txt")

    def test_empty_file_gives_empty_array(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# nothing here\n")
        assert read_points(path).shape == (0, 2)


# ---------------------------------------------------------------------------
# Benchmarks (smoke scale)
# ---------------------------------------------------------------------------


class TestDistanceBenchmark:
    def test_shape(self):
        records = run_distance_benchmark(3, seed=1)
        assert [r.method for r in records] == ["algebraic", "sampson", "confocal"]
        for record in records:
            assert record.n > 0
            assert all(math.isfinite(v) for v in (record.mean, record.median, record.p95))
            assert record.mean >= 0

    def test_deterministic_across_threads(self):
        serial = run_distance_benchmark(4, seed=8, threads=1)
        parallel = run_distance_benchmark(4, seed=8, threads=3)
        for a, b in zip(serial, parallel):
            np.testing.assert_array_equal(a.samples, b.samples)

    def test_ordering(self):
        means = {r.method: r.mean for r in run_distance_benchmark(20, seed=0)}
        assert means["confocal"] < means["sampson"] < means["algebraic"]

    def test_rejects_zero(self):
        with pytest.raises(ConfigError):
            run_distance_benchmark(0)

    def test_rejects_negative_seed(self):
        with pytest.raises(ConfigError, match="non-negative"):
            run_distance_benchmark(1, seed=-1)


class TestFitBenchmark:
    def test_overall_records(self):
        records = run_fit_benchmark(FitSuite.OVERALL, repeats=1, seed=2, configs=2)
        assert len(records) == 7
        assert {r.method for r in records} == {"halir", "taubin", "confocal"}
        assert not any(r.quantity == "iterations" and r.method != "confocal" for r in records)

    def test_small_aspect_records(self):
        records = run_fit_benchmark(FitSuite.SMALL_ASPECT, repeats=1, seed=2)
        assert len(records) == 46
        pooled = [r for r in records if r.parameter == "sweep-mean"]
        assert {r.method for r in pooled} == {"circle", "confocal"}

    def test_rejects_bad_counts(self):
        with pytest.raises(ConfigError):
            run_fit_benchmark(FitSuite.NOISE, repeats=0)
        with pytest.raises(ConfigError):
            run_fit_benchmark(FitSuite.OVERALL, repeats=1, configs=0)

    def test_overall_image_must_hold_the_widest_ellipse(self):
        experiments = load_experiments()
        cramped = dataclasses.replace(experiments, overall=dataclasses.replace(experiments.overall, image_size=500.0))
        with pytest.raises(ConfigError, match="image size"):
            run_fit_benchmark(FitSuite.OVERALL, repeats=1, configs=1, experiments=cramped)


def test_image_center_keeps_the_ellipse_inside():
    rng = np.random.default_rng(4)
    for _ in range(200):
        a, b, theta = 300.0, 100.0, rng.uniform(0, math.pi)
        cx, cy = image_center(rng, a, b, theta, 1024.0)
        edge = GeometricEllipse(cx, cy, a, b, theta).sample(360)
        assert np.all(edge >= -1e-9)
        assert np.all(edge <= 1024.0 + 1e-9)


def test_progress_counts_completions_across_threads(caplog):
    progress = ProgressLog("work", 100)
    with caplog.at_level(logging.INFO, logger="src.simulate.benchmark"):
        fan_out(lambda _: progress.tick(), 100, 4)
    assert progress.done == 100
    counts = [int(r.getMessage().split(": ")[1].split("/")[0]) for r in caplog.records if r.name == "src.simulate.benchmark"]
    assert sorted(counts) == list(range(10, 101, 10))
