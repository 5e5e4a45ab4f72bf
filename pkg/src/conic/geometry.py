"""
Geometric ellipse representation and the ellipse-aligned frame
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from src.errors import InvalidAxes

# Relative axis gap below which an ellipse is treated as a circle
CIRCLE_RTOL = 1e-12


@dataclass(frozen=True)
class Point2:
    """A 2D point (pixels or metres depending on context)."""
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class EllipseFramePoint:
    """Coordinates in the translated and rotated ellipse-aligned frame."""
    X: float
    Y: float


@dataclass(frozen=True)
class GeometricEllipse:
    """
    The 5-parameter ellipse (x_c, y_c, a_e, b_e, theta).

    Construction only checks finiteness and positive axes. Use canonicalize()
    to get a_e >= b_e and theta in [0, pi).
    """
    x_c: float
    y_c: float
    a_e: float
    b_e: float
    theta: float

    def __post_init__(self) -> None:
        values = (self.x_c, self.y_c, self.a_e, self.b_e, self.theta)
        if not all(math.isfinite(v) for v in values):
            raise InvalidAxes(f"non-finite ellipse parameters {values}")
        if self.a_e <= 0 or self.b_e <= 0:
            raise InvalidAxes(f"axis lengths must be positive, got a={self.a_e}, b={self.b_e}")

    @property
    def focal_distance(self) -> float:
        """Distance of either focus from the center, sqrt(a^2 - b^2)."""
        return math.sqrt(max((self.a_e - self.b_e) * (self.a_e + self.b_e), 0.0))

    @property
    def is_canonical(self) -> bool:
        return self.a_e >= self.b_e and 0.0 <= self.theta < math.pi

    @property
    def center(self) -> tuple[float, float]:
        return self.x_c, self.y_c

    def as_array(self) -> np.ndarray:
        return np.array([self.x_c, self.y_c, self.a_e, self.b_e, self.theta], dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> GeometricEllipse:
        x_c, y_c, a_e, b_e, theta = (float(v) for v in values)
        return cls(x_c, y_c, a_e, b_e, theta)

    def sample(self, n: int, start: float = 0.0, stop: float = 2.0 * math.pi) -> np.ndarray:
        """Exact points at n parametric angles spread uniformly over [start, stop)."""
        t = np.linspace(start, stop, n, endpoint=False)
        c, s = math.cos(self.theta), math.sin(self.theta)
        ex = self.a_e * np.cos(t)
        ey = self.b_e * np.sin(t)
        return np.column_stack((self.x_c + ex * c - ey * s, self.y_c + ex * s + ey * c))

    def __str__(self) -> str:
        return (
            f"({self.x_c:.10g}, {self.y_c:.10g}, {self.a_e:.10g}, "
            f"{self.b_e:.10g}, {self.theta:.10g})"
        )


EllipseLike = Union[GeometricEllipse, Sequence[float], np.ndarray]
PointsLike = Union[np.ndarray, Iterable[Point2], Iterable[Sequence[float]]]


def as_points(points: PointsLike) -> np.ndarray:
    """Return an (N, 2) float array from Point2 objects, pairs or an array."""
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        rows = [(p.x, p.y) if isinstance(p, Point2) else tuple(p) for p in points]
        arr = np.asarray(rows, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.shape[1] != 2:
        raise ValueError(f"expected (N, 2) points, got shape {arr.shape}")
    return arr


def canonicalize(rho_raw: EllipseLike) -> GeometricEllipse:
    """
    Return the canonical form of an ellipse: a_e >= b_e, theta in [0, pi).

    Swapped axes rotate theta by pi/2. Circles get theta = 0.
    """
    if isinstance(rho_raw, GeometricEllipse):
        x_c, y_c, a, b, theta = rho_raw.x_c, rho_raw.y_c, rho_raw.a_e, rho_raw.b_e, rho_raw.theta
    else:
        x_c, y_c, a, b, theta = (float(v) for v in rho_raw)

    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0 or b <= 0:
        raise InvalidAxes(f"axis lengths must be positive, got a={a}, b={b}")
    if not math.isfinite(theta):
        raise InvalidAxes(f"non-finite rotation {theta}")

    if a < b:
        a, b = b, a
        theta += math.pi / 2

    theta = math.fmod(theta, math.pi)
    if theta < 0:
        theta += math.pi
    if theta >= math.pi:
        theta = 0.0

    if a - b < CIRCLE_RTOL * a:
        theta = 0.0

    return GeometricEllipse(x_c, y_c, a, b, theta)


def frame_coordinates(rho: GeometricEllipse, xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ellipse-frame transform of an (N, 2) array."""
    c, s = math.cos(rho.theta), math.sin(rho.theta)
    dx = xy[:, 0] - rho.x_c
    dy = xy[:, 1] - rho.y_c
    return dx * c + dy * s, -dx * s + dy * c


def world_coordinates(rho: GeometricEllipse, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Inverse of frame_coordinates, returning an (N, 2) array."""
    c, s = math.cos(rho.theta), math.sin(rho.theta)
    return np.column_stack((rho.x_c + X * c - Y * s, rho.y_c + X * s + Y * c))


def to_ellipse_frame(rho: GeometricEllipse, p: Point2 | Sequence[float]) -> EllipseFramePoint:
    """Translate to the ellipse center and rotate by -theta."""
    x, y = (p.x, p.y) if isinstance(p, Point2) else (float(p[0]), float(p[1]))
    c, s = math.cos(rho.theta), math.sin(rho.theta)
    dx, dy = x - rho.x_c, y - rho.y_c
    return EllipseFramePoint(dx * c + dy * s, -dx * s + dy * c)


def from_ellipse_frame(rho: GeometricEllipse, q: EllipseFramePoint) -> Point2:
    c, s = math.cos(rho.theta), math.sin(rho.theta)
    return Point2(rho.x_c + q.X * c - q.Y * s, rho.y_c + q.X * s + q.Y * c)
