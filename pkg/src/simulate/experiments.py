"""
Experiment configuration - loads the tunables in data/experiments.json
Angles are stored there as multiples of pi.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Optional

import numpy as np

from src.errors import ConfigError
from src.fitters.lm import LMConfig

# Default experiment file, next to the package
EXPERIMENTS_PATH = Path(__file__).resolve().parents[2] / "data" / "experiments.json"

Range = tuple[float, float]


@dataclass(frozen=True)
class DistanceExperiment:
    """Random ellipses on quarter arcs for the distance benchmark."""
    semi_minor: float
    aspect: Range
    sigma: Range
    theta: Range
    arc: float


@dataclass(frozen=True)
class OverallExperiment:
    """Random configurations for the overall fit benchmark."""
    semi_minor: Range
    aspect: Range
    sigma: Range
    theta: Range
    arcs: tuple[float, ...]
    arc_start: float
    # Centers are drawn so the whole ellipse fits in an image this wide
    image_size: float


@dataclass(frozen=True)
class SweepBase:
    """Configuration held fixed while one parameter is swept."""
    theta: float
    aspect: float
    sigma: float
    arc: float
    arc_start: float
    semi_minor: float
    center: tuple[float, float]


@dataclass(frozen=True)
class Sweep:
    """One swept parameter and the fitters compared along it."""
    id: str
    parameter: str
    start: float
    step: float
    count: int
    in_pi: bool
    fitters: tuple[str, ...]

    def values(self) -> np.ndarray:
        raw = self.start + self.step * np.arange(self.count)
        return raw * math.pi if self.in_pi else raw


@dataclass(frozen=True)
class CylinderDefaults:
    band: float
    max_points: int
    fitters: tuple[str, ...]


@dataclass(frozen=True)
class Experiments:
    distance: DistanceExperiment
    overall: OverallExperiment
    sweep_base: SweepBase
    sweeps: dict[str, Sweep]
    lm: LMConfig
    cylinder: CylinderDefaults

    def get_sweep(self, sweep_id: str) -> Sweep:
        if sweep_id not in self.sweeps:
            raise ConfigError(f"unknown sweep '{sweep_id}' (choose from {', '.join(self.sweeps)})")
        return self.sweeps[sweep_id]


def _pi_range(values: list[float]) -> Range:
    lo, hi = values
    return (lo * math.pi, hi * math.pi)


def _range(values: list[float]) -> Range:
    lo, hi = values
    if lo > hi:
        raise ConfigError(f"range lower bound {lo} exceeds upper bound {hi}")
    return (float(lo), float(hi))


def parse_experiments(data: dict[str, Any]) -> Experiments:
    """Build Experiments from the decoded JSON document."""
    try:
        dist = data["distance"]
        overall = data["overall"]
        base = data["sweep_base"]
        sweeps = {
            entry["id"]: Sweep(
                id=entry["id"],
                parameter=entry["parameter"],
                start=float(entry["start"]),
                step=float(entry["step"]),
                count=int(entry["count"]),
                in_pi=bool(entry.get("in_pi", False)),
                fitters=tuple(entry["fitters"]),
            )
            for entry in data["sweeps"]
        }
        cylinder = data["cylinder"]
        return Experiments(
            distance=DistanceExperiment(
                semi_minor=float(dist["semi_minor"]),
                aspect=_range(dist["aspect"]),
                sigma=_range(dist["sigma"]),
                theta=_pi_range(dist["theta_pi"]),
                arc=float(dist["arc_pi"]) * math.pi,
            ),
            overall=OverallExperiment(
                semi_minor=_range(overall["semi_minor"]),
                aspect=_range(overall["aspect"]),
                sigma=_range(overall["sigma"]),
                theta=_pi_range(overall["theta_pi"]),
                arcs=tuple(float(a) * math.pi for a in overall["arcs_pi"]),
                arc_start=float(overall["arc_start_pi"]) * math.pi,
                image_size=float(overall["image_size"]),
            ),
            sweep_base=SweepBase(
                theta=float(base["theta_pi"]) * math.pi,
                aspect=float(base["aspect"]),
                sigma=float(base["sigma"]),
                arc=float(base["arc_pi"]) * math.pi,
                arc_start=float(base["arc_start_pi"]) * math.pi,
                semi_minor=float(base["semi_minor"]),
                center=(float(base["center"][0]), float(base["center"][1])),
            ),
            sweeps=sweeps,
            lm=LMConfig(**data["lm"]),
            cylinder=CylinderDefaults(
                band=float(cylinder["band"]),
                max_points=int(cylinder["max_points"]),
                fitters=tuple(cylinder["fitters"]),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed experiment configuration: {exc!r}") from exc


@lru_cache(maxsize=None)
def _load_cached(path: Path) -> Experiments:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read experiment file {path}: {exc}") from exc
    return parse_experiments(data)


def load_experiments(path: Optional[Path] = None) -> Experiments:
    """Load (and cache) the experiment configuration."""
    return _load_cached(Path(path) if path is not None else EXPERIMENTS_PATH)
