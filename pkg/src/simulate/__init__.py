# Simulate package
from src.simulate.benchmark import (
    FitSuite,
    ProgressLog,
    fan_out,
    image_center,
    run_distance_benchmark,
    run_fit_benchmark,
    trial_rng,
)
from src.simulate.experiments import Experiments, Sweep, load_experiments
from src.simulate.metrics import linear_r2, p_error, rmse
from src.simulate.raster import (
    EdgePixels,
    PixelRect,
    SimConfig,
    arc_mask,
    circumscribed_rect,
    ellipse_edge_pixels,
    rasterize_ellipse,
)
from src.simulate.records import (
    BenchmarkRecord,
    parse_numeric_rows,
    read_point_header,
    read_points,
    records_document,
    write_points,
    write_records_csv,
    write_records_json,
    write_table,
    write_table_csv,
)

__all__ = [
    "BenchmarkRecord",
    "EdgePixels",
    "Experiments",
    "FitSuite",
    "ProgressLog",
    "PixelRect",
    "SimConfig",
    "Sweep",
    "arc_mask",
    "circumscribed_rect",
    "ellipse_edge_pixels",
    "fan_out",
    "image_center",
    "linear_r2",
    "load_experiments",
    "p_error",
    "parse_numeric_rows",
    "rasterize_ellipse",
    "read_point_header",
    "read_points",
    "records_document",
    "rmse",
    "run_distance_benchmark",
    "run_fit_benchmark",
    "trial_rng",
    "write_points",
    "write_records_csv",
    "write_records_json",
    "write_table",
    "write_table_csv",
]
