"""
Levenberg-Marquardt geometric fits - confocal hyperbola distance ellipse fit
and the three-parameter circle reduction
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum, auto
from typing import Callable, Optional

import numpy as np

from src.conic.geometry import GeometricEllipse, PointsLike, as_points, canonicalize
from src.distance.confocal import confocal_distances, confocal_system
from src.errors import (
    ConfigError,
    ConfocalError,
    InitializationFailed,
    InsufficientPoints,
    InvalidAxes,
    NumericalFailure,
)
from src.fitters.direct import MIN_CIRCLE_POINTS, MIN_CONIC_POINTS, fit_halir, fit_kasa_circle

logger = logging.getLogger(__name__)

# Starting SD at or below this counts as an exact fit
INITIAL_SD_ATOL = 1e-24
# Damping beyond this multiple of trace(J^T J) can no longer move the estimate
MAX_DAMPING_RATIO = 1e16


class FitStatus(Enum):
    """How an iterative fit terminated."""
    CONVERGED = auto()
    MAX_ITERS = auto()
    INITIAL_WAS_OPTIMAL = auto()


@dataclass(frozen=True)
class LMConfig:
    """Damping schedule and stopping rules for Levenberg-Marquardt."""
    lambda0: float = 0.5
    nu0: float = 10.0
    gamma: float = 3.0
    max_iters: int = 50
    rel_tol: float = 1e-12
    # Largest semi-major accepted, as a multiple of the data extent
    max_extent_ratio: float = 1.0

    def __post_init__(self) -> None:
        if not self.lambda0 > 0:
            raise ConfigError(f"lambda0 must be positive, got {self.lambda0}")
        if not self.nu0 > 1:
            raise ConfigError(f"nu0 must exceed 1, got {self.nu0}")
        if not self.gamma > 1:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be at least 1, got {self.max_iters}")
        if not self.rel_tol >= 0:
            raise ConfigError(f"rel_tol must be non-negative, got {self.rel_tol}")
        if not self.max_extent_ratio > 0:
            raise ConfigError(f"max_extent_ratio must be positive, got {self.max_extent_ratio}")

    def to_dict(self) -> dict:
        return {
            "lambda0": self.lambda0,
            "nu0": self.nu0,
            "gamma": self.gamma,
            "max_iters": self.max_iters,
            "rel_tol": self.rel_tol,
            "max_extent_ratio": self.max_extent_ratio,
        }


@dataclass(frozen=True)
class FitResult:
    """Fitted ellipse with convergence diagnostics."""
    ellipse: GeometricEllipse
    iterations: int
    final_sd: float
    status: FitStatus
    initial_sd: float = math.nan
    # SD after every accepted step, starting with the initial estimate
    sd_history: tuple[float, ...] = ()


System = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
Project = Callable[[np.ndarray], np.ndarray]


def levenberg_marquardt(
    params: np.ndarray,
    system: System,
    project: Project,
    config: LMConfig,
) -> tuple[np.ndarray, int, float, FitStatus, tuple[float, ...]]:
    """
    Minimize the sum of squared residuals returned by system().

    project() maps a raw candidate to a valid parameter vector or raises
    InvalidAxes, in which case the step is rejected like an SD increase.
    Only improving steps are accepted, so the returned SD is the lowest seen.
    """
    residuals, jac = system(params)
    sd = float(residuals @ residuals)
    if not math.isfinite(sd):
        raise InitializationFailed(f"initial estimate has non-finite SD ({sd})")

    history = [sd]
    if sd <= INITIAL_SD_ATOL:
        return params, 0, sd, FitStatus.INITIAL_WAS_OPTIMAL, tuple(history)

    lam = config.lambda0
    nu = config.nu0
    eye = np.eye(len(params))
    status = FitStatus.MAX_ITERS
    iterations = 0

    for iterations in range(1, config.max_iters + 1):
        jtj = jac.T @ jac
        gradient = jac.T @ residuals
        lam_ceiling = MAX_DAMPING_RATIO * max(float(np.trace(jtj)), 1.0)

        try:
            step = np.linalg.solve(jtj + lam * eye, gradient)
        except np.linalg.LinAlgError as exc:
            if lam >= lam_ceiling:
                raise NumericalFailure(f"normal equations singular at damping {lam:g}") from exc
            step = None

        sd_new = math.inf
        if step is not None and np.all(np.isfinite(step)):
            try:
                candidate = project(params - step)
                res_new, jac_new = system(candidate)
                sd_new = float(res_new @ res_new)
            except InvalidAxes:
                sd_new = math.inf
            if not math.isfinite(sd_new):
                sd_new = math.inf

        if abs(sd_new - sd) <= config.rel_tol * max(sd, np.finfo(float).eps):
            if sd_new < sd:
                params, residuals, jac, sd = candidate, res_new, jac_new, sd_new
                history.append(sd)
            status = FitStatus.CONVERGED
            logger.debug("iter %d: converged at SD=%.6g", iterations, sd)
            break

        if sd_new < sd:
            logger.debug("iter %d: accept SD %.6g -> %.6g (lambda=%.3g)", iterations, sd, sd_new, lam)
            params, residuals, jac, sd = candidate, res_new, jac_new, sd_new
            history.append(sd)
            lam /= config.gamma
            nu = config.nu0
        else:
            logger.debug("iter %d: reject SD %.6g (lambda=%.3g)", iterations, sd_new, lam)
            lam *= nu
            nu = min(nu * nu, 1e100)
            if lam > lam_ceiling:
                status = FitStatus.CONVERGED
                logger.debug("iter %d: damping ceiling reached, keeping SD=%.6g", iterations, sd)
                break

    return params, iterations, sd, status, tuple(history)


# =============================================================================
# ELLIPSE
# =============================================================================

def data_extent(points: PointsLike) -> float:
    """Diameter of the smallest centroid-centred disc holding every point."""
    xy = as_points(points)
    offsets = xy - xy.mean(axis=0)
    return 2.0 * float(np.max(np.hypot(offsets[:, 0], offsets[:, 1])))


def fit_confocal_lm(
    points: PointsLike,
    config: Optional[LMConfig] = None,
    init: Optional[GeometricEllipse] = None,
) -> FitResult:
    """
    Fit an ellipse by minimizing summed squared confocal hyperbola distances.

    Starts from init, or from the Halir fit when init is None. Candidates are
    canonicalized every iteration so the estimate stays a valid ellipse.

    A step whose semi-major exceeds config.max_extent_ratio times the data
    extent (or the starting semi-major, if larger) is rejected. On short noisy
    arcs the summed distance keeps falling as the ellipse grows without bound;
    the bound stops that drift.
    """
    config = config or LMConfig()
    xy = as_points(points)
    if len(xy) < MIN_CONIC_POINTS:
        raise InsufficientPoints(MIN_CONIC_POINTS, len(xy))

    if init is None:
        try:
            init = fit_halir(xy)
        except ConfocalError as exc:
            raise InitializationFailed(f"initial ellipse estimate failed: {exc}") from exc
    init = canonicalize(init)

    limit = max(config.max_extent_ratio * data_extent(xy), init.a_e)

    def system(params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return confocal_system(GeometricEllipse.from_array(params), xy)

    def project(params: np.ndarray) -> np.ndarray:
        candidate = canonicalize(params)
        if candidate.a_e > limit:
            raise InvalidAxes(f"semi-major {candidate.a_e:.6g} exceeds the extent bound {limit:.6g}")
        return candidate.as_array()

    params, iterations, sd, status, history = levenberg_marquardt(init.as_array(), system, project, config)
    ellipse = GeometricEllipse.from_array(params)
    logger.debug("confocal LM: %s after %d iterations, SD=%.6g", status.name, iterations, sd)
    return FitResult(ellipse, iterations, sd, status, history[0], history)


# =============================================================================
# CIRCLE
# =============================================================================

def _circle_system(xy: np.ndarray) -> System:
    def system(params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        xc, yc, radius = params
        dx = xy[:, 0] - xc
        dy = xy[:, 1] - yc
        r = np.hypot(dx, dy)
        safe = np.where(r > 0, r, 1.0)
        jac = np.column_stack((
            np.where(r > 0, -dx / safe, 0.0),
            np.where(r > 0, -dy / safe, 0.0),
            -np.ones_like(r),
        ))
        return r - radius, jac

    return system


def _project_circle(params: np.ndarray) -> np.ndarray:
    if not (math.isfinite(params[2]) and params[2] > 0):
        raise InvalidAxes(f"circle radius must be positive, got {params[2]}")
    return params


def fit_circle_lm(
    points: PointsLike,
    config: Optional[LMConfig] = None,
    init: Optional[GeometricEllipse] = None,
) -> FitResult:
    """Geometric circle fit over (x_c, y_c, R), started from the Kasa fit."""
    config = config or LMConfig()
    xy = as_points(points)
    if len(xy) < MIN_CIRCLE_POINTS:
        raise InsufficientPoints(MIN_CIRCLE_POINTS, len(xy))

    if init is None:
        try:
            init = fit_kasa_circle(xy)
        except ConfocalError as exc:
            raise InitializationFailed(f"initial circle estimate failed: {exc}") from exc

    start = np.array([init.x_c, init.y_c, 0.5 * (init.a_e + init.b_e)])
    params, iterations, sd, status, history = levenberg_marquardt(
        start, _circle_system(xy), _project_circle, config
    )
    xc, yc, radius = (float(v) for v in params)
    return FitResult(GeometricEllipse(xc, yc, radius, radius, 0.0), iterations, sd, status, history[0], history)


def closed_form_result(ellipse: GeometricEllipse, points: PointsLike) -> FitResult:
    """Wrap a closed-form estimate in a FitResult scored by confocal distance."""
    distances = confocal_distances(ellipse, points)
    sd = float(distances @ distances)
    return FitResult(ellipse, 0, sd, FitStatus.CONVERGED, sd, (sd,))
