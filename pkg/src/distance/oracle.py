"""
Projection oracle - exact orthogonal projection of points onto an ellipse

Ground truth for every accuracy comparison. Works in the first quadrant of
the ellipse frame and brackets the root of the Lagrange-multiplier equation,
which is monotone on its bracket, so bisection always converges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.conic.geometry import (
    EllipseFramePoint,
    GeometricEllipse,
    Point2,
    PointsLike,
    as_points,
    canonicalize,
    frame_coordinates,
)

MAX_BISECTIONS = 200


@dataclass(frozen=True)
class ProjectionResult:
    """Orthogonal projection of a single point; contact is in the ellipse frame."""
    contact: EllipseFramePoint
    distance: float
    inside: bool


@dataclass(frozen=True)
class ProjectionBatch:
    """Vectorized projections; contact_x/contact_y are ellipse-frame and signed."""
    contact_x: np.ndarray
    contact_y: np.ndarray
    distance: np.ndarray
    inside: np.ndarray

    def __len__(self) -> int:
        return len(self.distance)


def _first_quadrant_contact(a: float, b: float, u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest ellipse point for u, v >= 0, returned as non-negative magnitudes."""
    f2 = (a - b) * (a + b)
    xi = np.empty_like(u)
    yi = np.empty_like(v)

    on_major = v == 0.0
    on_minor = (u == 0.0) & ~on_major
    general = ~(on_major | on_minor)

    # Minor axis: the top vertex is always nearest
    xi[on_minor] = 0.0
    yi[on_minor] = b

    # Major axis: interior points short of the evolute cusp touch off-axis
    if np.any(on_major):
        um = u[on_major]
        inside_cusp = a * um < f2
        x_major = np.where(inside_cusp, a * a * um / (f2 if f2 > 0 else 1.0), a)
        y_major = b * np.sqrt(np.clip(1.0 - (x_major / a) ** 2, 0.0, None))
        xi[on_major] = x_major
        yi[on_major] = np.where(inside_cusp, y_major, 0.0)

    if np.any(general):
        ug, vg = u[general], v[general]
        au, bv = a * ug, b * vg
        lo = bv.copy()
        hi = np.hypot(au, bv)

        def residual(tau: np.ndarray) -> np.ndarray:
            return (au / (tau + f2)) ** 2 + (bv / tau) ** 2 - 1.0

        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (lo + hi)
            active = (mid > lo) & (mid < hi)
            if not np.any(active):
                break
            positive = residual(mid) > 0.0
            lo = np.where(active & positive, mid, lo)
            hi = np.where(active & ~positive, mid, hi)

        tau = 0.5 * (lo + hi)
        xi[general] = a * au / (tau + f2)
        yi[general] = b * bv / tau

    return xi, yi


def project_frame_points(rho: GeometricEllipse, X: np.ndarray, Y: np.ndarray) -> ProjectionBatch:
    """Project ellipse-frame coordinates; rho must be canonical."""
    a, b = rho.a_e, rho.b_e
    u, v = np.abs(X), np.abs(Y)
    xi, yi = _first_quadrant_contact(a, b, u, v)

    cx = np.copysign(xi, X)
    cy = np.copysign(yi, Y)
    distance = np.hypot(X - cx, Y - cy)
    inside = (X / a) ** 2 + (Y / b) ** 2 < 1.0
    return ProjectionBatch(cx, cy, distance, inside)


def project_points_oracle(rho: GeometricEllipse, points: PointsLike) -> ProjectionBatch:
    """Project world points onto rho. Contacts are reported in the ellipse frame."""
    if not rho.a_e >= rho.b_e:
        rho = canonicalize(rho)
    xy = as_points(points)
    X, Y = frame_coordinates(rho, xy)
    return project_frame_points(rho, X, Y)


def project_point_oracle(rho: GeometricEllipse, p: Point2) -> ProjectionResult:
    batch = project_points_oracle(rho, [p])
    contact = EllipseFramePoint(float(batch.contact_x[0]), float(batch.contact_y[0]))
    return ProjectionResult(contact, float(batch.distance[0]), bool(batch.inside[0]))
