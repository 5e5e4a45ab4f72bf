"""
Cutting-plane sections - near-plane point selection and the rotation that
maps the plane onto z = const
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.cylinder.cloud import PointCloud, SeedLike, Vector3, perpendicular_basis
from src.errors import ConfigError, InsufficientPoints

logger = logging.getLogger(__name__)

MIN_SECTION_POINTS = 6
DEFAULT_BAND = 0.001
DEFAULT_MAX_POINTS = 50


@dataclass(frozen=True)
class CuttingPlane:
    """Plane through anchor with unit normal."""
    normal: Vector3
    anchor: Vector3

    def __post_init__(self) -> None:
        if abs(float(np.linalg.norm(self.normal)) - 1.0) > 1e-12:
            raise ConfigError(f"plane normal must be a unit vector, got {self.normal}")

    @classmethod
    def through(cls, anchor: Sequence[float], normal: Sequence[float]) -> CuttingPlane:
        n = np.asarray(normal, dtype=float)
        norm = float(np.linalg.norm(n))
        if not math.isfinite(norm) or norm == 0.0:
            raise ConfigError(f"plane normal must be non-zero, got {normal}")
        n = n / norm
        return cls(tuple(float(v) for v in n), tuple(float(v) for v in anchor))

    @property
    def normal_array(self) -> np.ndarray:
        return np.array(self.normal, dtype=float)

    @property
    def anchor_array(self) -> np.ndarray:
        return np.array(self.anchor, dtype=float)

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        return (points - self.anchor_array) @ self.normal_array


@dataclass(frozen=True, eq=False)
class SectionSample:
    """
    Points selected near a cutting plane, rotated into the plane frame.

    rotation maps world vectors to the frame in which the plane normal is
    (0, 0, 1); points holds the rotated x, y and plane_z the dropped constant z.
    """
    points: np.ndarray
    rotation: np.ndarray
    plane: CuttingPlane

    @property
    def plane_z(self) -> float:
        return float(self.plane.normal_array @ self.plane.anchor_array)

    def __len__(self) -> int:
        return len(self.points)


def plane_rotation(normal: Sequence[float]) -> np.ndarray:
    """Proper rotation (det +1) whose rows are u, v = n x u, n."""
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    u, v = perpendicular_basis(n)
    return np.vstack((u, v, n))


def section_from_plane(
    cloud: PointCloud,
    plane: CuttingPlane,
    band: float = DEFAULT_BAND,
    max_points: int = DEFAULT_MAX_POINTS,
) -> SectionSample:
    """Take up to max_points cloud points closest to the plane, all within band."""
    distance = np.abs(plane.signed_distance(cloud.points))
    in_band = np.flatnonzero(distance <= band)
    if len(in_band) < MIN_SECTION_POINTS:
        raise InsufficientPoints(MIN_SECTION_POINTS, len(in_band), "points within the plane band")

    order = in_band[np.argsort(distance[in_band], kind="stable")][:max_points]
    rotation = plane_rotation(plane.normal)
    rotated = cloud.points[order] @ rotation.T
    return SectionSample(rotated[:, :2].copy(), rotation, plane)


def random_plane(cloud: PointCloud, rng: np.random.Generator) -> CuttingPlane:
    """Plane through a random cloud point with a normal uniform on the sphere."""
    anchor = cloud.points[int(rng.integers(len(cloud)))]
    while True:
        normal = rng.normal(size=3)
        if np.linalg.norm(normal) > 1e-12:
            return CuttingPlane.through(anchor, normal)


def sample_section(
    cloud: PointCloud,
    seed: SeedLike,
    band: float = DEFAULT_BAND,
    max_points: int = DEFAULT_MAX_POINTS,
) -> SectionSample:
    rng = np.random.default_rng(seed)
    plane = random_plane(cloud, rng)
    return section_from_plane(cloud, plane, band, max_points)
