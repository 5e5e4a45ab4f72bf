"""
Point clouds and cylinder parameters - loading, synthesis and
point-to-axis measurements
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

from src.errors import ConfigError, EmptyInput, FileAccessError
from src.simulate.records import SCHEMA_VERSION, parse_numeric_rows

logger = logging.getLogger(__name__)

Vector3 = tuple[float, float, float]
SeedLike = Union[int, Sequence[int]]

UNIT_ATOL = 1e-9


def _unit(v: Sequence[float], what: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(arr))
    if arr.shape != (3,) or not math.isfinite(norm) or norm == 0.0:
        raise ConfigError(f"{what} must be a non-zero finite 3-vector, got {v}")
    return arr / norm


@dataclass(frozen=True, eq=False)
class PointCloud:
    """3D points in metres as an (N, 3) array."""
    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"expected (N, 3) points, got shape {pts.shape}")
        if len(pts) == 0:
            raise EmptyInput("point cloud has no points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud has non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)


@dataclass(frozen=True)
class CylinderParams:
    """
    Infinite cylinder: radius, unit axis direction and a point on the axis.

    Use from_line() to build the canonical form (unit axis, axis point at the
    foot of the perpendicular from the origin). axis and -axis describe the
    same cylinder.
    """
    radius: float
    axis: Vector3
    axis_point: Vector3

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ConfigError(f"cylinder radius must be positive, got {self.radius}")
        if abs(float(np.linalg.norm(self.axis)) - 1.0) > UNIT_ATOL:
            raise ConfigError(f"cylinder axis must be a unit vector, got {self.axis}")

    @classmethod
    def from_line(cls, radius: float, axis: Sequence[float], point: Sequence[float]) -> CylinderParams:
        direction = _unit(axis, "cylinder axis")
        p = np.asarray(point, dtype=float)
        foot = p - (p @ direction) * direction
        return cls(float(radius), tuple(float(v) for v in direction), tuple(float(v) for v in foot))

    @property
    def axis_array(self) -> np.ndarray:
        return np.array(self.axis, dtype=float)

    @property
    def point_array(self) -> np.ndarray:
        return np.array(self.axis_point, dtype=float)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "radius": self.radius,
            "axis": list(self.axis),
            "axis_point": list(self.axis_point),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CylinderParams:
        try:
            return cls.from_line(float(data["radius"]), data["axis"], data["axis_point"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed cylinder description: {exc!r}") from exc


def load_cylinder_params(path: Path) -> CylinderParams:
    """Read a reference cylinder from JSON (radius, axis, axis_point)."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise FileAccessError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return CylinderParams.from_dict(data)


def save_cylinder_params(path: Path, params: CylinderParams) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(params.to_dict(), f, indent=2)
        f.write("\n")


# =============================================================================
# CLOUD I/O
# =============================================================================

def load_point_cloud(path: Path) -> PointCloud:
    """Read 'x y z' lines (whitespace or comma separated, '#' comments)."""
    points, _ = parse_numeric_rows(Path(path), 3)
    if len(points) == 0:
        raise EmptyInput(f"{path} contains no points")
    cloud = PointCloud(points)
    lo, hi = cloud.bounds
    logger.info("loaded %d points from %s, bounds %s .. %s", len(cloud), path, lo.round(4), hi.round(4))
    return cloud


def write_point_cloud(path: Path, cloud: PointCloud) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for x, y, z in cloud.points:
            f.write(f"{x:.17g} {y:.17g} {z:.17g}\n")


# =============================================================================
# GEOMETRY
# =============================================================================

def axis_distance(points: np.ndarray, params: CylinderParams) -> np.ndarray:
    """Distance of each point (or a single point) from the cylinder axis line."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    offset = pts - params.point_array
    along = offset @ params.axis_array
    radial = offset - np.outer(along, params.axis_array)
    return np.linalg.norm(radial, axis=1)


def normalized_rmse(cloud: PointCloud, params: CylinderParams) -> float:
    """RMSE of radial residuals divided by the square root of the section area."""
    residual = axis_distance(cloud.points, params) - params.radius
    rmse = float(np.sqrt(np.mean(residual * residual)))
    return rmse / math.sqrt(math.pi * params.radius ** 2)


def principal_axis(cloud: PointCloud) -> np.ndarray:
    """Dominant direction of the cloud; a default axis hint for elongated cylinders."""
    centered = cloud.points - cloud.points.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    direction = vt[0]
    return direction if direction[int(np.argmax(np.abs(direction)))] >= 0 else -direction


def perpendicular_basis(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing axis to a right-handed orthonormal frame."""
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(axis)))] = 1.0
    u = helper - (helper @ axis) * axis
    u /= np.linalg.norm(u)
    return u, np.cross(axis, u)


def synthesize_cylinder(
    params: CylinderParams,
    height: float,
    n_points: int,
    noise: float = 0.0,
    seed: SeedLike = 0,
) -> PointCloud:
    """
    Random points on a cylinder patch of the given height centred on the foot
    point, with Gaussian radial noise of standard deviation `noise` metres.
    """
    if n_points < 1:
        raise ConfigError(f"n_points must be at least 1, got {n_points}")
    rng = np.random.default_rng(seed)
    axis = params.axis_array
    u, v = perpendicular_basis(axis)

    along = rng.uniform(-height / 2.0, height / 2.0, size=n_points)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=n_points)
    radius = params.radius + (rng.normal(0.0, noise, size=n_points) if noise > 0 else 0.0)

    points = (
        params.point_array
        + np.outer(along, axis)
        + np.outer(radius * np.cos(phi), u)
        + np.outer(radius * np.sin(phi), v)
    )
    return PointCloud(points)
