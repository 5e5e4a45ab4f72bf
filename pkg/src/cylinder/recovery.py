"""
Cylinder recovery from a planar section ellipse, and the forward
intersection of a cylinder with a plane

A plane tilted by delta from the cylinder's cross-section cuts an ellipse
with b_e = R and a_e = R / cos(delta). The major axis lies along the
in-plane projection of the cylinder axis; its center is where the axis
pierces the plane.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from src.conic.geometry import GeometricEllipse, canonicalize
from src.cylinder.cloud import CylinderParams
from src.cylinder.section import CuttingPlane, SectionSample, plane_rotation
from src.errors import NotAnEllipse

logger = logging.getLogger(__name__)

# Axis within this angle of the plane cannot pierce it
PARALLEL_ATOL = 1e-12


def tilt_angle(ellipse: GeometricEllipse) -> float:
    """Angle between the cutting plane's normal and the cylinder axis, in [0, pi/2)."""
    ellipse = canonicalize(ellipse)
    return math.acos(min(ellipse.b_e / ellipse.a_e, 1.0))


def recover_cylinder(
    ellipse: GeometricEllipse,
    section: SectionSample,
    axis_hint: Sequence[float],
) -> CylinderParams:
    """
    Cylinder from the section ellipse fitted in the plane frame.

    The two axis directions tilted by +-delta about the ellipse's minor axis
    are indistinguishable from one section; the one closer to axis_hint is
    chosen and oriented so that axis . axis_hint >= 0.
    """
    ellipse = canonicalize(ellipse)
    radius = ellipse.b_e
    delta = tilt_angle(ellipse)

    rotation = section.rotation
    hint = np.asarray(axis_hint, dtype=float)
    in_plane = np.array([math.cos(ellipse.theta), math.sin(ellipse.theta), 0.0])
    e_z = np.array([0.0, 0.0, 1.0])

    candidates = [
        rotation.T @ (math.cos(delta) * e_z + sign * math.sin(delta) * in_plane)
        for sign in (1.0, -1.0)
    ]
    axis = max(candidates, key=lambda c: abs(float(c @ hint)))
    if axis @ hint < 0:
        axis = -axis

    # Ellipse center lifted back onto the plane, then into world coordinates
    center = rotation.T @ np.array([ellipse.x_c, ellipse.y_c, section.plane_z])
    params = CylinderParams.from_line(radius, axis, center)
    logger.debug("recovered cylinder R=%.6g delta=%.4f deg axis=%s", radius, math.degrees(delta), params.axis)
    return params


def intersect_cylinder(params: CylinderParams, plane: CuttingPlane) -> GeometricEllipse:
    """
    Closed-form section ellipse of a cylinder and a plane, expressed in the
    plane frame of plane_rotation(plane.normal).
    """
    rotation = plane_rotation(plane.normal)
    axis = rotation @ params.axis_array
    point = rotation @ params.point_array
    plane_z = float(plane.normal_array @ plane.anchor_array)

    cos_delta = abs(float(axis[2]))
    if cos_delta <= PARALLEL_ATOL:
        raise NotAnEllipse("cylinder axis is parallel to the cutting plane")

    t = (plane_z - point[2]) / axis[2]
    pierce = point + t * axis
    a_e = params.radius / cos_delta
    theta = math.atan2(axis[1], axis[0]) if cos_delta < 1.0 else 0.0
    return canonicalize((float(pierce[0]), float(pierce[1]), a_e, params.radius, theta))


def section_axial_span(params: CylinderParams, plane: CuttingPlane) -> tuple[float, float]:
    """Lowest and highest axial coordinate (along params.axis from axis_point) of the section ellipse."""
    normal = plane.normal_array
    cos_delta = float(params.axis_array @ normal)
    if abs(cos_delta) <= PARALLEL_ATOL:
        raise NotAnEllipse("cylinder axis is parallel to the cutting plane")
    pierce = float((plane.anchor_array - params.point_array) @ normal) / cos_delta
    half = params.radius * math.sqrt(max(1.0 - cos_delta * cos_delta, 0.0)) / abs(cos_delta)
    return pierce - half, pierce + half
