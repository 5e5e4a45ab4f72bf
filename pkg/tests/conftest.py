"""Shared fixtures: reference ellipses, exact samples and a synthetic cylinder."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.conic import GeometricEllipse
from src.cylinder import CylinderParams, synthesize_cylinder

# ---------------------------------------------------------------------------
# Reference shapes
# ---------------------------------------------------------------------------

# Rotated, off-center ellipse used throughout the suite
REFERENCE_RHO = GeometricEllipse(1.0, 3.0, 15.0, 10.0, math.pi / 6)
# Axis-aligned ellipse with focal distance 4
AXIS_RHO = GeometricEllipse(0.0, 0.0, 5.0, 3.0, 0.0)


@pytest.fixture
def reference_rho() -> GeometricEllipse:
    return REFERENCE_RHO


@pytest.fixture
def axis_rho() -> GeometricEllipse:
    return AXIS_RHO


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def exact_points(rho: GeometricEllipse, n: int = 100, start: float = 0.0, stop: float = 2.0 * math.pi) -> np.ndarray:
    """n noise-free points at parametric angles in [start, stop) on rho."""
    return rho.sample(n, start, stop)


def random_ellipse(rng: np.random.Generator, min_aspect: float = 1.0, max_aspect: float = 4.0) -> GeometricEllipse:
    """Random canonical ellipse with semi-minor in [1, 20] pixels."""
    b = rng.uniform(1.0, 20.0)
    aspect = rng.uniform(min_aspect, max_aspect)
    return GeometricEllipse(
        rng.uniform(-50.0, 50.0),
        rng.uniform(-50.0, 50.0),
        aspect * b,
        b,
        rng.uniform(0.0, math.pi),
    )


# ---------------------------------------------------------------------------
# Cylinder
# ---------------------------------------------------------------------------

@pytest.fixture
def reference_cylinder() -> CylinderParams:
    return CylinderParams.from_line(0.25, (0.1, -0.2, 1.0), (1.0, 2.0, 0.0))


@pytest.fixture
def synthetic_cloud(reference_cylinder):
    return synthesize_cylinder(reference_cylinder, height=2.0, n_points=20000, noise=0.0, seed=3)
