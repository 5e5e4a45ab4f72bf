"""
Direct (closed-form) fitters - Halir's stable ellipse-specific fit, Taubin's
gradient-weighted fit and the Kasa algebraic circle fit

All three work on mean-centered, isotropically scaled points and map the
resulting conic back to the input coordinates.
"""

from __future__ import annotations

import logging
import math

import numpy as np
import scipy.linalg

from src.conic.algebraic import AlgebraicConic, algebraic_to_geometric, design_matrix
from src.conic.geometry import GeometricEllipse, PointsLike, as_points
from src.errors import DegenerateInput, InsufficientPoints, NotAnEllipse

logger = logging.getLogger(__name__)

MIN_CONIC_POINTS = 6
MIN_CIRCLE_POINTS = 3

# Condition number above which the linear block of Halir's scatter matrix is singular
HALIR_MAX_CONDITION = 1e13
# Eigenvalues of the Taubin pencil below this fraction of the largest are zero
TAUBIN_ZERO_RTOL = 1e-10

# Inverse of the 3x3 constraint block enforcing 4AC - B^2 = 1
_C1_INV = np.array([
    [0.0, 0.0, 0.5],
    [0.0, -1.0, 0.0],
    [0.5, 0.0, 0.0],
])


def _normalize(xy: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Center on the mean and scale to unit RMS distance per axis."""
    mean = xy.mean(axis=0)
    centered = xy - mean
    scale = math.sqrt(float(np.mean(np.sum(centered * centered, axis=1))) / 2.0)
    if scale == 0.0 or not math.isfinite(scale):
        raise DegenerateInput("points are coincident")
    return centered / scale, mean, scale


def _denormalize(tau: np.ndarray, mean: np.ndarray, scale: float) -> AlgebraicConic:
    """Express a conic fitted to normalized points in the original coordinates."""
    A, B, C, D, E, F = tau
    mx, my = mean
    D0 = scale * D
    E0 = scale * E
    return AlgebraicConic(
        A,
        B,
        C,
        -2.0 * A * mx - B * my + D0,
        -B * mx - 2.0 * C * my + E0,
        A * mx * mx + B * mx * my + C * my * my - D0 * mx - E0 * my + scale * scale * F,
    ).normalized()


def _require(xy: np.ndarray, needed: int) -> None:
    if len(xy) < needed:
        raise InsufficientPoints(needed, len(xy))


# =============================================================================
# HALIR
# =============================================================================

def fit_halir_conic(points: PointsLike) -> AlgebraicConic:
    """Ellipse-specific least-squares conic via the partitioned scatter matrix."""
    xy = as_points(points)
    _require(xy, MIN_CONIC_POINTS)
    uv, mean, scale = _normalize(xy)

    design = design_matrix(uv)
    quad, lin = design[:, :3], design[:, 3:]
    s1 = quad.T @ quad
    s2 = quad.T @ lin
    s3 = lin.T @ lin

    if np.linalg.cond(s3) > HALIR_MAX_CONDITION:
        raise DegenerateInput("points are collinear or coincident (singular linear scatter block)")

    t = -np.linalg.solve(s3, s2.T)
    reduced = _C1_INV @ (s1 + s2 @ t)

    _, vectors = scipy.linalg.eig(reduced)
    vectors = np.real(vectors)
    constraint = 4.0 * vectors[0] * vectors[2] - vectors[1] ** 2
    if not np.any(constraint > 0):
        raise DegenerateInput("no eigenvector satisfies the ellipse condition")

    a1 = vectors[:, int(np.argmax(constraint))]
    tau = np.concatenate((a1, t @ a1))
    return _denormalize(tau, mean, scale)


def fit_halir(points: PointsLike) -> GeometricEllipse:
    conic = fit_halir_conic(points)
    try:
        return algebraic_to_geometric(conic)
    except NotAnEllipse as exc:
        raise DegenerateInput(f"direct fit produced no real ellipse: {exc}") from exc


# =============================================================================
# TAUBIN
# =============================================================================

def fit_taubin(points: PointsLike) -> AlgebraicConic:
    """
    Conic minimizing the algebraic error over the summed squared gradient norm.

    The constant term is eliminated in closed form, leaving a 5x5 symmetric
    definite pencil. The result is a general conic and may be a hyperbola.
    """
    xy = as_points(points)
    _require(xy, MIN_CONIC_POINTS)
    uv, mean, scale = _normalize(xy)
    u, v = uv[:, 0], uv[:, 1]

    lifted = design_matrix(uv)[:, :5]
    lifted_mean = lifted.mean(axis=0)
    centered = lifted - lifted_mean
    scatter = centered.T @ centered

    # Summed G^T G of the gradient rows dP/du and dP/dv, constant column dropped
    n = len(u)
    zeros, ones = np.zeros(n), np.ones(n)
    grad_u = np.column_stack((2 * u, v, zeros, ones, zeros))
    grad_v = np.column_stack((zeros, u, 2 * v, zeros, ones))
    weight = grad_u.T @ grad_u + grad_v.T @ grad_v

    try:
        values, vectors = scipy.linalg.eigh(scatter, weight)
    except np.linalg.LinAlgError as exc:
        raise DegenerateInput(f"rank-deficient Taubin pencil: {exc}") from exc

    zero_band = TAUBIN_ZERO_RTOL * max(abs(values[-1]), np.finfo(float).tiny)
    if np.count_nonzero(np.abs(values) <= zero_band) > 1:
        raise DegenerateInput("points do not determine a unique conic (rank-deficient pencil)")

    t5 = vectors[:, 0]
    tau = np.append(t5, -lifted_mean @ t5)
    return _denormalize(tau, mean, scale)


# =============================================================================
# KASA CIRCLE
# =============================================================================

def fit_kasa_circle(points: PointsLike) -> GeometricEllipse:
    """Linear least-squares circle on x^2 + y^2 + Dx + Ey + F = 0."""
    xy = as_points(points)
    _require(xy, MIN_CIRCLE_POINTS)
    uv, mean, scale = _normalize(xy)

    lhs = np.column_stack((uv, np.ones(len(uv))))
    rhs = -np.sum(uv * uv, axis=1)
    solution, _, rank, _ = np.linalg.lstsq(lhs, rhs, rcond=None)
    if rank < 3:
        raise DegenerateInput("points are collinear; no circle passes through them")

    D, E, F = solution
    cx, cy = -D / 2.0, -E / 2.0
    r2 = cx * cx + cy * cy - F
    if not r2 > 0:
        raise DegenerateInput("algebraic circle fit has no real radius")

    radius = math.sqrt(r2) * scale
    logger.debug("kasa circle: center=(%g, %g) radius=%g", cx * scale + mean[0], cy * scale + mean[1], radius)
    return GeometricEllipse(cx * scale + mean[0], cy * scale + mean[1], radius, radius, 0.0)
