"""
Cylinder benchmark - random plane sections of a point cloud, one ellipse
fit per section and fitter, errors against a reference cylinder
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.cylinder.cloud import CylinderParams, PointCloud, axis_distance
from src.cylinder.recovery import recover_cylinder, section_axial_span
from src.cylinder.section import DEFAULT_BAND, DEFAULT_MAX_POINTS, random_plane, section_from_plane
from src.errors import ConfigError, ConfocalError
from src.fitters.lm import LMConfig
from src.fitters.registry import get_fitter
from src.simulate.benchmark import ProgressLog, fan_out, trial_rng
from src.simulate.experiments import load_experiments

logger = logging.getLogger(__name__)

DEFAULT_CYLINDER_FITTERS = ("halir", "confocal")

CYLINDER_COLUMNS = [
    "fitter",
    "sections_used",
    "sections_skipped",
    "mean_center_mm",
    "mean_radius_mm",
    "mean_axis_deg",
]


@dataclass(frozen=True)
class SectionErrors:
    """Errors of one recovered cylinder against the reference."""
    center_mm: float
    radius_mm: float
    axis_deg: float


@dataclass(frozen=True)
class CylinderRow:
    """Per-fitter summary over all sampled sections."""
    fitter: str
    sections_used: int
    sections_skipped: int
    mean_center_mm: float
    mean_radius_mm: float
    mean_axis_deg: float

    def as_row(self) -> list:
        return [
            self.fitter,
            self.sections_used,
            self.sections_skipped,
            self.mean_center_mm,
            self.mean_radius_mm,
            self.mean_axis_deg,
        ]


def cylinder_errors(recovered: CylinderParams, reference: CylinderParams) -> SectionErrors:
    """Center as point-to-reference-axis distance (mm), radius (mm), axis angle (degrees)."""
    cos_angle = min(abs(float(recovered.axis_array @ reference.axis_array)), 1.0)
    return SectionErrors(
        center_mm=1000.0 * float(axis_distance(recovered.point_array, reference)[0]),
        radius_mm=1000.0 * abs(recovered.radius - reference.radius),
        axis_deg=math.degrees(math.acos(cos_angle)),
    )


def _plane_trial(
    cloud: PointCloud,
    reference: CylinderParams,
    axial_range: tuple[float, float],
    seed: int,
    index: int,
    fitters: Sequence[str],
    band: float,
    max_points: int,
    config: LMConfig,
) -> dict[str, Optional[SectionErrors]]:
    plane = random_plane(cloud, trial_rng(seed, index))
    try:
        lo, hi = section_axial_span(reference, plane)
        if lo < axial_range[0] or hi > axial_range[1]:
            logger.debug("plane %d skipped: section leaves the scanned length", index)
            return {name: None for name in fitters}
        section = section_from_plane(cloud, plane, band, max_points)
    except ConfocalError as exc:
        logger.warning("plane %d skipped: %s", index, exc)
        return {name: None for name in fitters}

    errors: dict[str, Optional[SectionErrors]] = {}
    init = None
    for name in fitters:
        fitter = get_fitter(name)
        try:
            result = fitter(section.points, config, init)
            recovered = recover_cylinder(result.ellipse, section, reference.axis)
        except ConfocalError as exc:
            logger.warning("plane %d: %s fit skipped: %s", index, fitter.label, exc)
            errors[name] = None
            continue
        if name == "halir":
            init = result.ellipse
        errors[name] = cylinder_errors(recovered, reference)
    return errors


def run_cylinder_benchmark(
    cloud: PointCloud,
    reference: CylinderParams,
    n_planes: int,
    seed: int = 0,
    fitters: Sequence[str] = DEFAULT_CYLINDER_FITTERS,
    band: float = DEFAULT_BAND,
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
    config: Optional[LMConfig] = None,
) -> list[CylinderRow]:
    """
    Sample n_planes random sections, fit each with every fitter and recover
    the cylinder, using the reference axis as the tilt-sign hint.

    Only planes whose section ellipse closes within the scanned length of the
    reference cylinder are fitted. The others, and sections that cannot be
    fitted, are counted as skipped.
    """
    if n_planes < 1:
        raise ConfigError(f"n_planes must be at least 1, got {n_planes}")
    config = config or load_experiments().lm
    # Halir first so the iterative fits start from it
    fitters = sorted(fitters, key=lambda n: n != "halir")
    for name in fitters:
        get_fitter(name)

    axial = (cloud.points - reference.point_array) @ reference.axis_array
    axial_range = (float(axial.min()), float(axial.max()))
    progress = ProgressLog("cylinder benchmark", n_planes)

    def run(index: int) -> dict[str, Optional[SectionErrors]]:
        errors = _plane_trial(cloud, reference, axial_range, seed, index, fitters, band, max_points, config)
        progress.tick()
        return errors

    trials = fan_out(run, n_planes, threads)

    rows = []
    for name in fitters:
        found = [t[name] for t in trials if t[name] is not None]
        skipped = n_planes - len(found)
        if found:
            means = np.mean([[e.center_mm, e.radius_mm, e.axis_deg] for e in found], axis=0)
        else:
            means = np.full(3, math.nan)
        rows.append(CylinderRow(name, len(found), skipped, float(means[0]), float(means[1]), float(means[2])))
        logger.info("cylinder benchmark %s: %d sections used, %d skipped", name, len(found), skipped)
    return rows
