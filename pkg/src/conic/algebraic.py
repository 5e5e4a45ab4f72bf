"""
Algebraic conic form - conversions to and from the geometric ellipse,
and classification of the general conic
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, auto
from typing import Sequence

import numpy as np

from src.conic.geometry import GeometricEllipse, canonicalize
from src.errors import NotAnEllipse

# Relative tolerances for the exact-arithmetic conditions of the classifier
DETERMINANT_RTOL = 1e-12
DISCRIMINANT_RTOL = 1e-12


class ConicClass(Enum):
    """Type of the point set a conic describes."""
    ELLIPSE = auto()
    HYPERBOLA = auto()
    PARABOLA = auto()
    DEGENERATE = auto()


@dataclass(frozen=True)
class AlgebraicConic:
    """
    Coefficients of A x^2 + B xy + C y^2 + D x + E y + F = 0.

    The coefficients are stored as given. normalized() returns the
    scale-free representative (unit L2 norm, first nonzero of A, B, C positive).
    """
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    def __post_init__(self) -> None:
        values = self.coefficients
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"non-finite conic coefficients {values}")
        if all(v == 0.0 for v in values):
            raise ValueError("conic coefficients are all zero")

    @property
    def coefficients(self) -> tuple[float, float, float, float, float, float]:
        return (self.A, self.B, self.C, self.D, self.E, self.F)

    def as_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> AlgebraicConic:
        return cls(*(float(v) for v in values))

    @property
    def scale(self) -> float:
        """Largest coefficient magnitude."""
        return max(abs(v) for v in self.coefficients)

    def normalized(self) -> AlgebraicConic:
        tau = self.as_array()
        tau = tau / np.linalg.norm(tau)
        for lead in tau[:3]:
            if lead != 0.0:
                if lead < 0:
                    tau = -tau
                break
        return AlgebraicConic.from_array(tau)

    def matrix(self) -> np.ndarray:
        """Symmetric 3x3 matrix of the homogeneous quadratic form."""
        A, B, C, D, E, F = self.coefficients
        return np.array([
            [A, B / 2, D / 2],
            [B / 2, C, E / 2],
            [D / 2, E / 2, F],
        ])

    @property
    def discriminant(self) -> float:
        return self.B * self.B - 4.0 * self.A * self.C

    def __str__(self) -> str:
        return "(" + ", ".join(f"{v:.10g}" for v in self.coefficients) + ")"


def design_matrix(xy: np.ndarray) -> np.ndarray:
    """Stack the lifted rows (x^2, xy, y^2, x, y, 1) of an (N, 2) array."""
    x, y = xy[:, 0], xy[:, 1]
    return np.column_stack((x * x, x * y, y * y, x, y, np.ones_like(x)))


def geometric_to_algebraic(rho: GeometricEllipse, normalize: bool = True) -> AlgebraicConic:
    """
    Expand the geometric ellipse equation into conic coefficients.

    With normalize=False the direct expansion is returned, whose constant
    term before expansion is -1. That scaling is the one algebraic distances
    are reported in.
    """
    c, s = math.cos(rho.theta), math.sin(rho.theta)
    ia2 = 1.0 / (rho.a_e * rho.a_e)
    ib2 = 1.0 / (rho.b_e * rho.b_e)
    xc, yc = rho.x_c, rho.y_c

    A = c * c * ia2 + s * s * ib2
    B = 2.0 * c * s * (ia2 - ib2)
    C = s * s * ia2 + c * c * ib2
    D = -2.0 * A * xc - B * yc
    E = -B * xc - 2.0 * C * yc
    F = A * xc * xc + B * xc * yc + C * yc * yc - 1.0

    conic = AlgebraicConic(A, B, C, D, E, F)
    return conic.normalized() if normalize else conic


def classify_conic(tau: AlgebraicConic) -> ConicClass:
    """Classify by the 3x3 determinant and the discriminant B^2 - 4AC."""
    scale = tau.scale
    det = float(np.linalg.det(tau.matrix()))
    if abs(det) < DETERMINANT_RTOL * scale ** 3:
        return ConicClass.DEGENERATE

    disc = tau.discriminant
    if abs(disc) <= DISCRIMINANT_RTOL * scale ** 2:
        return ConicClass.PARABOLA
    if disc < 0:
        return ConicClass.ELLIPSE
    return ConicClass.HYPERBOLA


def algebraic_to_geometric(tau: AlgebraicConic) -> GeometricEllipse:
    """
    Recover the canonical geometric ellipse of a conic.

    Raises NotAnEllipse for hyperbolas, parabolas, degenerate conics and
    imaginary ellipses (no real points).
    """
    kind = classify_conic(tau)
    if kind is not ConicClass.ELLIPSE:
        raise NotAnEllipse(f"conic {tau} is a {kind.name.lower()}, not an ellipse")

    A, B, C, D, E, F = tau.coefficients
    center = np.linalg.solve(np.array([[2 * A, B], [B, 2 * C]]), np.array([-D, -E]))
    xc, yc = float(center[0]), float(center[1])
    f0 = F + (D * xc + E * yc) / 2.0

    theta = 0.5 * math.atan2(B, A - C)
    c, s = math.cos(theta), math.sin(theta)
    lam_major = A * c * c + B * c * s + C * s * s
    lam_minor = A * s * s - B * c * s + C * c * c

    sq1 = -f0 / lam_major
    sq2 = -f0 / lam_minor
    if not (sq1 > 0 and sq2 > 0):
        raise NotAnEllipse(f"conic {tau} is an imaginary ellipse")

    return canonicalize((xc, yc, math.sqrt(sq1), math.sqrt(sq2), theta))
