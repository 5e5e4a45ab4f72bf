"""
Algebraic and Sampson distances, and the line sweeps that compare every
distance measure along fixed arrangements of points
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.conic.algebraic import AlgebraicConic, design_matrix, geometric_to_algebraic
from src.conic.geometry import GeometricEllipse, Point2, PointsLike, as_points, world_coordinates
from src.distance.confocal import confocal_distances
from src.distance.oracle import project_points_oracle
from src.errors import ConfigError, UndefinedAtCriticalPoint

# Gradient norm below which the Sampson distance is undefined
SAMPSON_GRADIENT_ATOL = 1e-14


def algebraic_distances(tau: AlgebraicConic, points: PointsLike) -> np.ndarray:
    """Conic polynomial value at each point, with tau's coefficients as given."""
    return design_matrix(as_points(points)) @ tau.as_array()


def algebraic_distance(tau: AlgebraicConic, p: Point2) -> float:
    return float(algebraic_distances(tau, [p])[0])


def sampson_distances(tau: AlgebraicConic, points: PointsLike) -> np.ndarray:
    """
    Algebraic distance divided by its gradient norm.

    NaN marks points where the gradient vanishes (the conic center).
    """
    xy = as_points(points)
    A, B, C, D, E, _ = tau.coefficients
    x, y = xy[:, 0], xy[:, 1]
    grad = np.hypot(2 * A * x + B * y + D, B * x + 2 * C * y + E)
    d_alg = design_matrix(xy) @ tau.as_array()
    defined = grad >= SAMPSON_GRADIENT_ATOL
    return np.where(defined, d_alg / np.where(defined, grad, 1.0), np.nan)


def sampson_distance(tau: AlgebraicConic, p: Point2) -> float:
    value = float(sampson_distances(tau, [p])[0])
    if math.isnan(value):
        raise UndefinedAtCriticalPoint(
            f"Sampson distance undefined at ({p.x}, {p.y}): conic gradient vanishes"
        )
    return value


# =============================================================================
# LINE SWEEPS
# =============================================================================

class SweepLine(Enum):
    """Point arrangements in the ellipse frame."""
    MAJOR_AXIS = "major-axis"
    MINOR_AXIS = "minor-axis"
    DIAGONAL = "diagonal"


@dataclass(frozen=True)
class SweepRow:
    """All four measures at one sweep point. sampson is NaN where undefined."""
    t: float
    x: float
    y: float
    algebraic: float
    sampson: float
    confocal: float
    oracle: float


SWEEP_EXTENT = 10.0


def distance_sweep(rho: GeometricEllipse, line: SweepLine, n: int = 201) -> list[SweepRow]:
    """
    Evaluate every distance measure at n points with the free coordinate in
    [-10, 10]: along the major axis, the minor axis, or the line X = Y of the
    ellipse frame. Algebraic and Sampson values use the direct expansion of rho.
    """
    if n < 2:
        raise ConfigError(f"sweep needs at least 2 samples, got {n}")

    t = np.linspace(-SWEEP_EXTENT, SWEEP_EXTENT, n)
    zeros = np.zeros_like(t)
    frame = {
        SweepLine.MAJOR_AXIS: (t, zeros),
        SweepLine.MINOR_AXIS: (zeros, t),
        SweepLine.DIAGONAL: (t, t),
    }[line]
    xy = world_coordinates(rho, *frame)

    tau = geometric_to_algebraic(rho, normalize=False)
    algebraic = algebraic_distances(tau, xy)
    sampson = sampson_distances(tau, xy)
    confocal = confocal_distances(rho, xy)
    oracle = project_points_oracle(rho, xy).distance

    return [
        SweepRow(
            float(t[i]), float(xy[i, 0]), float(xy[i, 1]),
            float(algebraic[i]), float(sampson[i]), float(confocal[i]), float(oracle[i]),
        )
        for i in range(n)
    ]
