"""
Ellipse rasterizer - pixel-accurate elliptical edge points with optional
Gaussian measurement noise
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from src.conic.geometry import GeometricEllipse, canonicalize, frame_coordinates, world_coordinates
from src.distance.oracle import project_frame_points
from src.errors import ConfigError, EmptyResult

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
HALF_PIXEL = 0.5
# Pixels farther than this from the ellipse cannot have a contact within half a pixel per axis
PREFILTER_RADIUS = math.sqrt(2.0) / 2.0 + 1e-9
ARC_ATOL = 1e-12


@dataclass(frozen=True)
class SimConfig:
    """One simulated edge-point set."""
    rho: GeometricEllipse
    alpha_s: float = 0.0
    alpha_f: float = TWO_PI
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha_s) and math.isfinite(self.alpha_f)):
            raise ConfigError("arc angles must be finite")
        if not self.alpha_s < self.alpha_f <= self.alpha_s + TWO_PI + ARC_ATOL:
            raise ConfigError(
                f"arc must satisfy alpha_s < alpha_f <= alpha_s + 2pi, got [{self.alpha_s}, {self.alpha_f}]"
            )
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ConfigError(f"sigma must be finite and non-negative, got {self.sigma}")

    @property
    def arc(self) -> float:
        return self.alpha_f - self.alpha_s

    def header(self) -> dict[str, str]:
        """Key/value pairs written as the comment header of a point file."""
        r = self.rho
        return {
            "rho": f"{r.x_c!r},{r.y_c!r},{r.a_e!r},{r.b_e!r},{r.theta!r}",
            "alpha_s": repr(self.alpha_s),
            "alpha_f": repr(self.alpha_f),
            "sigma": repr(self.sigma),
            "seed": str(self.seed),
        }


@dataclass(frozen=True)
class PixelRect:
    """Integer bounds of the axis-aligned rectangle circumscribing an ellipse."""
    x_min: int
    x_max: int
    y_min: int
    y_max: int

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1


@dataclass(frozen=True)
class EdgePixels:
    """
    Grid pixels whose exact contact lies within half a pixel on both axes.

    contacts are world coordinates; angle is the parametric angle of each
    contact in [0, 2pi).
    """
    pixels: np.ndarray
    contacts: np.ndarray
    angle: np.ndarray

    def __len__(self) -> int:
        return len(self.pixels)


def circumscribed_rect(rho: GeometricEllipse) -> PixelRect:
    c, s = math.cos(rho.theta), math.sin(rho.theta)
    half_w = math.sqrt((rho.a_e * c) ** 2 + (rho.b_e * s) ** 2)
    half_h = math.sqrt((rho.a_e * s) ** 2 + (rho.b_e * c) ** 2)
    return PixelRect(
        math.floor(rho.x_c - half_w),
        math.ceil(rho.x_c + half_w),
        math.floor(rho.y_c - half_h),
        math.ceil(rho.y_c + half_h),
    )


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=128)
def ellipse_edge_pixels(rho: GeometricEllipse) -> EdgePixels:
    """
    Noise-free edge pixels of the full ellipse, cached per ellipse.

    Only pixels near the curve (by the scaled radial function, a lower bound
    on geometric distance) are projected exactly.
    """
    rho = canonicalize(rho)
    rect = circumscribed_rect(rho)
    xs = np.arange(rect.x_min, rect.x_max + 1, dtype=float)
    ys = np.arange(rect.y_min, rect.y_max + 1, dtype=float)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    grid = np.column_stack((gx.ravel(), gy.ravel()))

    X, Y = frame_coordinates(rho, grid)
    radial = np.sqrt((X / rho.a_e) ** 2 + (Y / rho.b_e) ** 2)
    near = rho.b_e * np.abs(radial - 1.0) <= PREFILTER_RADIUS
    grid, X, Y = grid[near], X[near], Y[near]

    proj = project_frame_points(rho, X, Y)
    contacts = world_coordinates(rho, proj.contact_x, proj.contact_y)
    within = np.all(np.abs(grid - contacts) <= HALF_PIXEL, axis=1)

    angle = np.mod(np.arctan2(proj.contact_y / rho.b_e, proj.contact_x / rho.a_e), TWO_PI)
    logger.debug("edge pixels for %s: %d of %d grid pixels", rho, int(within.sum()), rect.width * rect.height)
    return EdgePixels(_freeze(grid[within]), _freeze(contacts[within]), _freeze(angle[within]))


def arc_mask(angle: np.ndarray, alpha_s: float, alpha_f: float) -> np.ndarray:
    """Angles inside [alpha_s, alpha_f], measured counter-clockwise from alpha_s."""
    span = alpha_f - alpha_s
    if span >= TWO_PI - ARC_ATOL:
        return np.ones(len(angle), dtype=bool)
    return np.mod(angle - alpha_s, TWO_PI) <= span + ARC_ATOL


def rasterize_ellipse(config: SimConfig, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Simulated edge points as an (N, 2) array of integer pixel coordinates.

    Contacts on the arc get i.i.d. N(0, sigma^2) noise per coordinate and
    are rounded to the nearest pixel; duplicates are removed and the rows
    come back sorted. rng defaults to a generator seeded with config.seed.
    """
    edge = ellipse_edge_pixels(config.rho)
    keep = arc_mask(edge.angle, config.alpha_s, config.alpha_f)
    pixels = edge.pixels[keep]
    contacts = edge.contacts[keep]
    if len(pixels) == 0:
        raise EmptyResult(f"no pixel of {config.rho} survives the edge and arc filters")

    if config.sigma > 0:
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        contacts = contacts + rng.normal(0.0, config.sigma, size=contacts.shape)

    # sigma = 0 rounds every contact back onto its own pixel
    rounded = pixels + np.rint(contacts - pixels)
    return np.unique(rounded, axis=0)
