"""
Benchmark harnesses - distance accuracy against exact projection, and
fitter accuracy on random configurations and one-parameter sweeps

Every trial draws from its own generator seeded with (master seed, trial
indices), so results are identical for any worker count.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np

from src.conic.algebraic import geometric_to_algebraic
from src.conic.geometry import GeometricEllipse
from src.distance.confocal import confocal_distances
from src.distance.measures import algebraic_distances, sampson_distances
from src.distance.oracle import project_points_oracle
from src.errors import ConfigError, ConfocalError
from src.fitters.lm import LMConfig
from src.fitters.registry import get_fitter
from src.simulate.experiments import Experiments, Sweep, load_experiments
from src.simulate.metrics import linear_r2, p_error, rmse
from src.simulate.raster import TWO_PI, SimConfig, rasterize_ellipse
from src.simulate.records import BenchmarkRecord

logger = logging.getLogger(__name__)

T = TypeVar("T")

DISTANCE_METHODS = ("algebraic", "sampson", "confocal")
DEFAULT_CONFIGS = 200


class FitSuite(Enum):
    """Fit benchmark suites."""
    OVERALL = "overall"
    ROTATION = "rotation"
    ASPECT = "aspect"
    NOISE = "noise"
    ARC = "arc"
    SMALL_ASPECT = "small-aspect"


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for one trial."""
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng([seed, *keys])


def fan_out(fn: Callable[[int], T], count: int, threads: int) -> list[T]:
    """Run fn over range(count), returning results in index order."""
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


class ProgressLog:
    """Logs every tenth of completed tasks, counting completions across threads."""

    def __init__(self, label: str, total: int) -> None:
        self.label = label
        self.total = total
        self.done = 0
        self._step = max(total // 10, 1)
        self._lock = threading.Lock()

    def tick(self) -> None:
        with self._lock:
            self.done += 1
            done = self.done
        if done % self._step == 0 or done == self.total:
            logger.info("%s: %d/%d", self.label, done, self.total)


# =============================================================================
# DISTANCE BENCHMARK
# =============================================================================

@dataclass
class _DistanceTrial:
    deviations: dict[str, np.ndarray] = field(default_factory=dict)
    failures: dict[str, int] = field(default_factory=dict)


def _distance_trial(experiments: Experiments, seed: int, index: int) -> _DistanceTrial:
    ranges = experiments.distance
    rng = trial_rng(seed, index)
    theta = rng.uniform(*ranges.theta)
    aspect = rng.uniform(*ranges.aspect)
    sigma = rng.uniform(*ranges.sigma)
    cx, cy = rng.uniform(0.0, 1.0, size=2)
    alpha_s = rng.uniform(0.0, TWO_PI)

    b = ranges.semi_minor
    rho = GeometricEllipse(float(cx), float(cy), aspect * b, b, theta)
    trial = _DistanceTrial()
    try:
        points = rasterize_ellipse(SimConfig(rho, alpha_s, alpha_s + ranges.arc, sigma), rng)
    except ConfocalError as exc:
        logger.warning("distance trial %d skipped: %s", index, exc)
        trial.failures = {method: 1 for method in DISTANCE_METHODS}
        return trial

    truth = project_points_oracle(rho, points).distance
    tau = geometric_to_algebraic(rho, normalize=False)
    sampson = np.abs(sampson_distances(tau, points))
    undefined = np.isnan(sampson)

    trial.deviations = {
        "algebraic": np.abs(np.abs(algebraic_distances(tau, points)) - truth),
        "sampson": np.abs(sampson[~undefined] - truth[~undefined]),
        "confocal": np.abs(confocal_distances(rho, points) - truth),
    }
    trial.failures = {"algebraic": 0, "sampson": int(undefined.sum()), "confocal": 0}
    return trial


def run_distance_benchmark(
    n_ellipses: int,
    seed: int = 0,
    threads: int = 1,
    experiments: Optional[Experiments] = None,
) -> list[BenchmarkRecord]:
    """
    Compare algebraic, Sampson and confocal distances with the exact distance
    on simulated quarter-arc edge points of random ellipses.

    One record per method holds every |distance - exact| sample.
    """
    if n_ellipses < 1:
        raise ConfigError(f"n_ellipses must be at least 1, got {n_ellipses}")
    experiments = experiments or load_experiments()
    started = time.perf_counter()
    progress = ProgressLog("distance benchmark", n_ellipses)

    def run(index: int) -> _DistanceTrial:
        trial = _distance_trial(experiments, seed, index)
        progress.tick()
        return trial

    trials = fan_out(run, n_ellipses, threads)

    records = []
    for method in DISTANCE_METHODS:
        parts = [t.deviations[method] for t in trials if method in t.deviations]
        samples = np.concatenate(parts) if parts else np.empty(0)
        failures = sum(t.failures.get(method, 0) for t in trials)
        records.append(BenchmarkRecord("distance", "all", math.nan, method, "abs-deviation", samples, failures))

    logger.info("distance benchmark: %d ellipses in %.2fs", n_ellipses, time.perf_counter() - started)
    return records


# =============================================================================
# FIT BENCHMARK
# =============================================================================

@dataclass
class _FitOutcome:
    p_error: float
    rmse: float
    iterations: int
    seconds: float


def _fit_all(
    points: np.ndarray,
    truth: GeometricEllipse,
    fitters: Sequence[str],
    config: LMConfig,
) -> dict[str, Optional[_FitOutcome]]:
    """Run every fitter on one point set. Failed fits map to None."""
    outcomes: dict[str, Optional[_FitOutcome]] = {}
    init: Optional[GeometricEllipse] = None
    for name in fitters:
        fitter = get_fitter(name)
        started = time.perf_counter()
        try:
            result = fitter(points, config, init)
        except ConfocalError as exc:
            logger.warning("%s fit failed: %s", fitter.label, exc)
            outcomes[name] = None
            continue
        elapsed = time.perf_counter() - started
        if name == "halir":
            init = result.ellipse
        outcomes[name] = _FitOutcome(
            p_error(result.ellipse, truth),
            rmse(result.ellipse, points),
            result.iterations,
            elapsed,
        )
    return outcomes


def _ordered_fitters(names: Iterable[str]) -> list[str]:
    """Halir first so iterative fitters can reuse it as their start."""
    names = list(names)
    return sorted(names, key=lambda n: n != "halir")


class _Collector:
    """Accumulates samples per (value index, method, quantity)."""

    def __init__(self) -> None:
        self.samples: dict[tuple[int, str, str], list[float]] = defaultdict(list)
        self.failures: dict[tuple[int, str], int] = defaultdict(int)
        self.seconds: dict[str, list[float]] = defaultdict(list)

    def add(self, index: int, outcomes: dict[str, Optional[_FitOutcome]], quantities: Sequence[str]) -> None:
        for method, outcome in outcomes.items():
            if outcome is None:
                self.failures[(index, method)] += 1
                continue
            self.seconds[method].append(outcome.seconds)
            for quantity in quantities:
                if quantity == "iterations" and not get_fitter(method).iterative:
                    continue
                self.samples[(index, method, quantity)].append(float(getattr(outcome, quantity.replace("-", "_"))))

    def record(self, suite: str, parameter: str, value: float, index: int, method: str, quantity: str) -> BenchmarkRecord:
        samples = np.asarray(self.samples.get((index, method, quantity), []), dtype=float)
        return BenchmarkRecord(suite, parameter, value, method, quantity, samples, self.failures.get((index, method), 0))

    def log_timing(self, suite: str) -> None:
        for method, seconds in self.seconds.items():
            logger.info("%s: %s mean fit time %.3f ms", suite, method, 1000.0 * float(np.mean(seconds)))


def image_center(rng: np.random.Generator, a: float, b: float, theta: float, size: float) -> tuple[float, float]:
    """Uniform center that keeps the whole ellipse inside a size x size image."""
    c, s = math.cos(theta), math.sin(theta)
    half_w = math.hypot(a * c, b * s)
    half_h = math.hypot(a * s, b * c)
    return float(rng.uniform(half_w, size - half_w)), float(rng.uniform(half_h, size - half_h))


def _run_overall(
    experiments: Experiments,
    repeats: int,
    configs: int,
    seed: int,
    threads: int,
    config: LMConfig,
) -> list[BenchmarkRecord]:
    ranges = experiments.overall
    fitters = _ordered_fitters(["halir", "taubin", "confocal"])
    quantities = ("p-error", "rmse", "iterations")
    total = configs * repeats
    widest = 2.0 * ranges.aspect[1] * ranges.semi_minor[1]
    if widest > ranges.image_size:
        raise ConfigError(f"image size {ranges.image_size:g} cannot hold ellipses {widest:g} pixels wide")
    progress = ProgressLog("overall fit benchmark", total)

    def run(task: int) -> dict[str, Optional[_FitOutcome]]:
        index, repeat = divmod(task, repeats)
        cfg_rng = trial_rng(seed, index)
        aspect = cfg_rng.uniform(*ranges.aspect)
        sigma = cfg_rng.uniform(*ranges.sigma)
        b = cfg_rng.uniform(*ranges.semi_minor)
        theta = cfg_rng.uniform(*ranges.theta)
        arc = ranges.arcs[int(cfg_rng.integers(len(ranges.arcs)))]
        cx, cy = image_center(cfg_rng, aspect * b, b, theta, ranges.image_size)
        truth = GeometricEllipse(cx, cy, aspect * b, b, theta)

        rng = trial_rng(seed, index, repeat)
        alpha_s = ranges.arc_start
        try:
            points = rasterize_ellipse(SimConfig(truth, alpha_s, alpha_s + arc, sigma), rng)
        except ConfocalError as exc:
            logger.warning("config %d repeat %d skipped: %s", index, repeat, exc)
            outcomes = {name: None for name in fitters}
        else:
            outcomes = _fit_all(points, truth, fitters, config)
        progress.tick()
        return outcomes

    collector = _Collector()
    for outcomes in fan_out(run, total, threads):
        collector.add(0, outcomes, quantities)
    collector.log_timing("overall")

    return [
        collector.record("overall", "all", math.nan, 0, method, quantity)
        for method in fitters
        for quantity in quantities
        if not (quantity == "iterations" and not get_fitter(method).iterative)
    ]


def _sweep_config(experiments: Experiments, sweep: Sweep, value: float) -> tuple[GeometricEllipse, float, float]:
    """Base configuration with the swept parameter replaced: (truth, sigma, arc)."""
    base = experiments.sweep_base
    theta, aspect, sigma, arc = base.theta, base.aspect, base.sigma, base.arc
    if sweep.parameter == "theta":
        theta = value
    elif sweep.parameter == "aspect":
        aspect = value
    elif sweep.parameter == "sigma":
        sigma = value
    elif sweep.parameter == "arc":
        arc = value
    else:
        raise ConfigError(f"unknown sweep parameter '{sweep.parameter}'")
    b = base.semi_minor
    truth = GeometricEllipse(base.center[0], base.center[1], aspect * b, b, math.fmod(theta, math.pi))
    return truth, sigma, arc


def _run_sweep(
    experiments: Experiments,
    sweep: Sweep,
    repeats: int,
    seed: int,
    threads: int,
    config: LMConfig,
) -> list[BenchmarkRecord]:
    values = sweep.values()
    fitters = _ordered_fitters(sweep.fitters)
    quantities = ("p-error", "iterations")
    total = len(values) * repeats
    alpha_s = experiments.sweep_base.arc_start
    progress = ProgressLog(f"{sweep.id} sweep", total)

    def run(task: int) -> dict[str, Optional[_FitOutcome]]:
        index, repeat = divmod(task, repeats)
        truth, sigma, arc = _sweep_config(experiments, sweep, float(values[index]))
        rng = trial_rng(seed, index, repeat)
        try:
            points = rasterize_ellipse(SimConfig(truth, alpha_s, alpha_s + arc, sigma), rng)
        except ConfocalError as exc:
            logger.warning("%s=%g repeat %d skipped: %s", sweep.parameter, values[index], repeat, exc)
            outcomes = {name: None for name in fitters}
        else:
            outcomes = _fit_all(points, truth, fitters, config)
        progress.tick()
        return outcomes

    collector = _Collector()
    for task, outcomes in enumerate(fan_out(run, total, threads)):
        collector.add(task // repeats, outcomes, quantities)
    collector.log_timing(sweep.id)

    records = []
    for index, value in enumerate(values):
        for method in fitters:
            for quantity in quantities:
                if quantity == "iterations" and not get_fitter(method).iterative:
                    continue
                records.append(collector.record(sweep.id, sweep.parameter, float(value), index, method, quantity))

    for method in fitters:
        per_point = [r for r in records if r.method == method and r.quantity == "p-error"]
        pooled = np.concatenate([r.samples for r in per_point]) if per_point else np.empty(0)
        failures = sum(r.failures for r in per_point)
        records.append(BenchmarkRecord(sweep.id, "sweep-mean", math.nan, method, "p-error", pooled, failures))
        means = np.array([r.mean for r in per_point])
        finite = np.isfinite(means)
        if sweep.parameter == "sigma" and finite.sum() >= 2:
            logger.info("%s sweep: %s mean P-Error vs sigma linear R^2 = %.4f",
                        sweep.id, method, linear_r2(values[finite], means[finite]))
    return records


def run_fit_benchmark(
    suite: FitSuite,
    repeats: int,
    seed: int = 0,
    configs: int = DEFAULT_CONFIGS,
    threads: int = 1,
    config: Optional[LMConfig] = None,
    experiments: Optional[Experiments] = None,
) -> list[BenchmarkRecord]:
    """
    Fitter accuracy benchmark.

    OVERALL draws `configs` random configurations and reports P-Error, RMSE
    and iterations per fitter. The sweeps vary one parameter of the base
    configuration and report P-Error (and iterations) per sweep point plus a
    sweep-mean row per method.
    """
    if repeats < 1:
        raise ConfigError(f"repeats must be at least 1, got {repeats}")
    if configs < 1:
        raise ConfigError(f"configs must be at least 1, got {configs}")
    experiments = experiments or load_experiments()
    config = config or experiments.lm
    started = time.perf_counter()

    if suite is FitSuite.OVERALL:
        records = _run_overall(experiments, repeats, configs, seed, threads, config)
    else:
        records = _run_sweep(experiments, experiments.get_sweep(suite.value), repeats, seed, threads, config)

    logger.info("%s fit benchmark finished in %.2fs", suite.value, time.perf_counter() - started)
    return records
