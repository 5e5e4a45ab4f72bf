"""
Confocal hyperbola distance - closed-form approximation of the geometric
point-to-ellipse distance, and its analytic Jacobian

The query point fixes one confocal hyperbola; its intersection with the
ellipse is the contact point. Everything is evaluated on first-quadrant
magnitudes in the ellipse frame using the rearranged form that has no
division by the focal distance, so circles are handled exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from src.conic.geometry import (
    EllipseFramePoint,
    GeometricEllipse,
    Point2,
    PointsLike,
    as_points,
    canonicalize,
    frame_coordinates,
    to_ellipse_frame,
)

# |X| or |Y| below this fraction of a_e counts as lying on an axis
AXIS_RTOL = 1e-12
# Contact coordinate below this fraction of its semi-axis selects the axis rows
CONTACT_RTOL = 1e-10

SQRT2 = math.sqrt(2.0)

_E_A = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
_E_B = np.array([0.0, 0.0, 0.0, 1.0, 0.0])


@dataclass(frozen=True)
class DistanceVec:
    """Signed per-axis distance components in the ellipse frame and their norm."""
    d_x: float
    d_y: float
    norm: float


@dataclass(frozen=True)
class ContactPoint:
    """First-quadrant magnitudes of the contact point, ellipse frame."""
    X_I: float
    Y_I: float


@dataclass(frozen=True)
class JacobianRow:
    """Partial derivatives of the distance norm w.r.t. (x_c, y_c, a_e, b_e, theta)."""
    d_rho: tuple[float, float, float, float, float]

    def as_array(self) -> np.ndarray:
        return np.array(self.d_rho, dtype=float)


class _Contact(NamedTuple):
    x_i: np.ndarray
    y_i: np.ndarray
    g: np.ndarray
    sqrt_delta: np.ndarray
    s2: np.ndarray
    sqrt_m: np.ndarray
    on_minor: np.ndarray
    on_major: np.ndarray


def _canonical(rho: GeometricEllipse) -> GeometricEllipse:
    return rho if rho.a_e >= rho.b_e else canonicalize(rho)


def _contact(a: float, b: float, ax: np.ndarray, ay: np.ndarray) -> _Contact:
    """Contact magnitudes for first-quadrant magnitudes ax, ay (a >= b)."""
    f2 = (a - b) * (a + b)
    p2 = ax * ax
    q2 = ay * ay
    g = p2 - q2 - f2
    sqrt_delta = np.hypot(g, 2.0 * ax * ay)
    s2 = 0.5 * (p2 + q2 + f2 + sqrt_delta)

    with np.errstate(divide="ignore", invalid="ignore"):
        # s^2 - X^2 without cancellation on either sign of g
        sqrt_m = np.where(
            g > 0,
            SQRT2 * ax * ay / np.sqrt(sqrt_delta + g),
            np.sqrt(np.maximum(0.5 * (sqrt_delta - g), 0.0)),
        )
        s = np.sqrt(s2)
        big_l = np.minimum(ax / s, 1.0)
        big_m = np.minimum(sqrt_m / s, 1.0)

    on_minor = ax <= AXIS_RTOL * a
    on_major = ~on_minor & (ay <= AXIS_RTOL * a) & (p2 >= f2)

    x_i = np.where(on_minor, 0.0, np.where(on_major, a, a * big_l))
    y_i = np.where(on_minor, b, np.where(on_major, 0.0, b * big_m))
    return _Contact(x_i, y_i, g, sqrt_delta, s2, sqrt_m, on_minor, on_major)


def confocal_contact_point(rho: GeometricEllipse, q: EllipseFramePoint) -> ContactPoint:
    """Contact point for an ellipse-frame query point."""
    rho = _canonical(rho)
    ct = _contact(rho.a_e, rho.b_e, np.array([abs(q.X)]), np.array([abs(q.Y)]))
    return ContactPoint(float(ct.x_i[0]), float(ct.y_i[0]))


def confocal_components(rho: GeometricEllipse, points: PointsLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (d_x, d_y, norm) arrays for a batch of world points."""
    rho = _canonical(rho)
    X, Y = frame_coordinates(rho, as_points(points))
    ax, ay = np.abs(X), np.abs(Y)
    ct = _contact(rho.a_e, rho.b_e, ax, ay)
    d_x = ax - ct.x_i
    d_y = ay - ct.y_i
    return d_x, d_y, np.hypot(d_x, d_y)


def confocal_distances(rho: GeometricEllipse, points: PointsLike) -> np.ndarray:
    """Distance norms for a batch of world points."""
    return confocal_components(rho, points)[2]


def confocal_distance(rho: GeometricEllipse, p: Point2) -> DistanceVec:
    rho = _canonical(rho)
    q = to_ellipse_frame(rho, p)
    ct = _contact(rho.a_e, rho.b_e, np.array([abs(q.X)]), np.array([abs(q.Y)]))
    d_x = abs(q.X) - float(ct.x_i[0])
    d_y = abs(q.Y) - float(ct.y_i[0])
    return DistanceVec(d_x, d_y, math.hypot(d_x, d_y))


def confocal_system(rho: GeometricEllipse, points: PointsLike) -> tuple[np.ndarray, np.ndarray]:
    """
    Residuals and Jacobian for a batch of points.

    Returns the (N,) distance norms and the (N, 5) matrix of their partial
    derivatives w.r.t. (x_c, y_c, a_e, b_e, theta). Derivatives are taken in
    the canonical parameterization; non-canonical input is canonicalized first.
    Rows on the axis branches use the exact axis-distance derivatives, and
    rows whose components vanish use the symmetric limit of the norm, so
    every entry is finite.
    """
    rho = _canonical(rho)
    a, b = rho.a_e, rho.b_e
    xy = as_points(points)
    X, Y = frame_coordinates(rho, xy)
    ax, ay = np.abs(X), np.abs(Y)
    sx = np.where(X >= 0, 1.0, -1.0)
    sy = np.where(Y >= 0, 1.0, -1.0)
    ct = _contact(a, b, ax, ay)

    d_x = ax - ct.x_i
    d_y = ay - ct.y_i
    norm = np.hypot(d_x, d_y)

    n = len(X)
    c, s = math.cos(rho.theta), math.sin(rho.theta)
    ones = np.ones(n)
    zeros = np.zeros(n)

    # Frame coordinates w.r.t. (x_c, y_c, a_e, b_e, theta)
    dX = np.column_stack((-c * ones, -s * ones, zeros, zeros, Y))
    dY = np.column_stack((s * ones, -c * ones, zeros, zeros, -X))
    d_f2 = 2.0 * a * _E_A - 2.0 * b * _E_B

    Xc, Yc = X[:, None], Y[:, None]
    axc, ayc = ax[:, None], ay[:, None]
    d_ax = sx[:, None] * dX
    d_ay = sy[:, None] * dY

    g = ct.g[:, None]
    sqrt_delta = ct.sqrt_delta[:, None]
    s2 = ct.s2[:, None]
    sqrt_m = ct.sqrt_m[:, None]

    with np.errstate(divide="ignore", invalid="ignore"):
        dg = 2.0 * Xc * dX - 2.0 * Yc * dY - d_f2
        dt = 2.0 * Xc * dX + 2.0 * Yc * dY + d_f2
        d_sqrt_delta = (g * dg + 4.0 * Xc * Yc * (Yc * dX + Xc * dY)) / sqrt_delta
        ds2 = 0.5 * (dt + d_sqrt_delta)

        s = np.sqrt(s2)
        s3 = s2 * s
        big_l = axc / s
        d_big_l = d_ax / s - axc * ds2 / (2.0 * s3)

        q = sqrt_delta + g
        dq = d_sqrt_delta + dg
        d_sqrt_m = np.where(
            g > 0,
            SQRT2 * (d_ax * ayc + axc * d_ay) / np.sqrt(q) - sqrt_m * dq / (2.0 * q),
            (d_sqrt_delta - dg) / (4.0 * sqrt_m),
        )
        big_m = sqrt_m / s
        d_big_m = d_sqrt_m / s - sqrt_m * ds2 / (2.0 * s3)

        d_xi = _E_A * big_l + a * d_big_l
        d_yi = _E_B * big_m + b * d_big_m

    dd_x = d_ax - d_xi
    dd_y = d_ay - d_yi

    # Axis rows: contact pinned to a vertex
    minor_row = (ct.on_minor | (ct.x_i <= CONTACT_RTOL * a))[:, None]
    major_row = (~minor_row[:, 0] & (ct.on_major | (ct.y_i <= CONTACT_RTOL * b)))[:, None]
    dd_x = np.where(minor_row, 0.0, np.where(major_row, d_ax - _E_A, dd_x))
    dd_y = np.where(minor_row, d_ay - _E_B, np.where(major_row, 0.0, dd_y))

    jac = _combine_components(d_x, d_y, dd_x, dd_y)
    return norm, jac


def _combine_components(d_x: np.ndarray, d_y: np.ndarray, dd_x: np.ndarray, dd_y: np.ndarray) -> np.ndarray:
    """Chain rule through the norm, with the limiting forms where it is not smooth."""
    sgn_x = np.where(d_x >= 0, 1.0, -1.0)[:, None]
    sgn_y = np.where(d_y >= 0, 1.0, -1.0)[:, None]
    rx, ry = d_x[:, None], d_y[:, None]

    both_zero = (d_x == 0) & (d_y == 0)
    x_zero = (d_x == 0) & ~both_zero
    y_zero = (d_y == 0) & ~both_zero
    equal = ~both_zero & (np.abs(d_x) == np.abs(d_y))

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        general = (
            sgn_x * dd_x / np.sqrt(1.0 + (ry / rx) ** 2)
            + sgn_y * dd_y / np.sqrt((rx / ry) ** 2 + 1.0)
        )

    half_root2 = SQRT2 / 2.0
    jac = general
    jac = np.where(equal[:, None], half_root2 * (sgn_x * dd_x + sgn_y * dd_y), jac)
    jac = np.where(y_zero[:, None], sgn_x * dd_x, jac)
    jac = np.where(x_zero[:, None], sgn_y * dd_y, jac)
    jac = np.where(both_zero[:, None], half_root2 * (dd_x + dd_y), jac)
    return jac


def confocal_jacobian(rho: GeometricEllipse, p: Point2) -> JacobianRow:
    _, jac = confocal_system(rho, [p])
    row = jac[0]
    return JacobianRow(tuple(float(v) for v in row))
