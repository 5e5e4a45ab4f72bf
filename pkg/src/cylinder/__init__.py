# Cylinder package
from src.cylinder.benchmark import (
    CYLINDER_COLUMNS,
    CylinderRow,
    SectionErrors,
    cylinder_errors,
    run_cylinder_benchmark,
)
from src.cylinder.cloud import (
    CylinderParams,
    PointCloud,
    axis_distance,
    load_cylinder_params,
    load_point_cloud,
    normalized_rmse,
    principal_axis,
    save_cylinder_params,
    synthesize_cylinder,
    write_point_cloud,
)
from src.cylinder.recovery import intersect_cylinder, recover_cylinder, section_axial_span, tilt_angle
from src.cylinder.section import (
    CuttingPlane,
    SectionSample,
    plane_rotation,
    random_plane,
    sample_section,
    section_from_plane,
)

__all__ = [
    "CYLINDER_COLUMNS",
    "CuttingPlane",
    "CylinderParams",
    "CylinderRow",
    "PointCloud",
    "SectionErrors",
    "SectionSample",
    "axis_distance",
    "cylinder_errors",
    "intersect_cylinder",
    "load_cylinder_params",
    "load_point_cloud",
    "normalized_rmse",
    "plane_rotation",
    "principal_axis",
    "random_plane",
    "recover_cylinder",
    "run_cylinder_benchmark",
    "sample_section",
    "save_cylinder_params",
    "section_axial_span",
    "section_from_plane",
    "synthesize_cylinder",
    "tilt_angle",
    "write_point_cloud",
]
