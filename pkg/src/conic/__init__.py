# Conic package
from src.conic.geometry import (
    EllipseFramePoint,
    GeometricEllipse,
    Point2,
    as_points,
    canonicalize,
    frame_coordinates,
    from_ellipse_frame,
    to_ellipse_frame,
    world_coordinates,
)
from src.conic.algebraic import (
    AlgebraicConic,
    ConicClass,
    algebraic_to_geometric,
    classify_conic,
    design_matrix,
    geometric_to_algebraic,
)

__all__ = [
    "AlgebraicConic",
    "ConicClass",
    "EllipseFramePoint",
    "GeometricEllipse",
    "Point2",
    "algebraic_to_geometric",
    "as_points",
    "canonicalize",
    "classify_conic",
    "design_matrix",
    "frame_coordinates",
    "from_ellipse_frame",
    "geometric_to_algebraic",
    "to_ellipse_frame",
    "world_coordinates",
]
