# Distance package
from src.distance.confocal import (
    ContactPoint,
    DistanceVec,
    JacobianRow,
    confocal_components,
    confocal_contact_point,
    confocal_distance,
    confocal_distances,
    confocal_jacobian,
    confocal_system,
)
from src.distance.measures import (
    SweepLine,
    SweepRow,
    algebraic_distance,
    algebraic_distances,
    distance_sweep,
    sampson_distance,
    sampson_distances,
)
from src.distance.oracle import (
    ProjectionBatch,
    ProjectionResult,
    project_frame_points,
    project_point_oracle,
    project_points_oracle,
)

__all__ = [
    "ContactPoint",
    "DistanceVec",
    "JacobianRow",
    "ProjectionBatch",
    "ProjectionResult",
    "SweepLine",
    "SweepRow",
    "algebraic_distance",
    "algebraic_distances",
    "confocal_components",
    "confocal_contact_point",
    "confocal_distance",
    "confocal_distances",
    "confocal_jacobian",
    "confocal_system",
    "distance_sweep",
    "project_frame_points",
    "project_point_oracle",
    "project_points_oracle",
    "sampson_distance",
    "sampson_distances",
]
