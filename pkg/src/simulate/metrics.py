"""
Evaluation metrics for fitted ellipses
"""

from __future__ import annotations

import math

import numpy as np

from src.conic.geometry import GeometricEllipse, PointsLike, as_points, canonicalize
from src.distance.oracle import project_points_oracle
from src.errors import EmptyInput


def rmse(rho: GeometricEllipse, points: PointsLike) -> float:
    """Root mean square of exact orthogonal distances from points to rho."""
    xy = as_points(points)
    if len(xy) == 0:
        raise EmptyInput("cannot compute RMSE of an empty point set")
    distances = project_points_oracle(rho, xy).distance
    return float(np.sqrt(np.mean(distances * distances)))


def p_error(est: GeometricEllipse, truth: GeometricEllipse) -> float:
    """
    Relative parameter error in percent: 100 * |rho_est - rho_truth| / |rho_truth|.

    Both ellipses are canonicalized first and the theta residual is the
    shortest angle modulo pi. Pixel and radian components share one norm.
    """
    est = canonicalize(est)
    truth = canonicalize(truth)
    diff = est.as_array() - truth.as_array()
    dtheta = abs(diff[4]) % math.pi
    diff[4] = min(dtheta, math.pi - dtheta)
    return 100.0 * float(np.linalg.norm(diff)) / float(np.linalg.norm(truth.as_array()))


def linear_r2(x: np.ndarray, y: np.ndarray) -> float:
    """Coefficient of determination of the least-squares line through (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = float(np.sum((y - y.mean()) ** 2))
    if total == 0.0:
        return 1.0
    return 1.0 - float(np.sum(residual * residual)) / total
