"""
Subcommand handlers - glue between parsed arguments and the library
Every handler returns the process exit code.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Iterator, Optional

from src.conic.algebraic import geometric_to_algebraic
from src.conic.geometry import GeometricEllipse, Point2
from src.cylinder.benchmark import CYLINDER_COLUMNS, run_cylinder_benchmark
from src.cylinder.cloud import load_cylinder_params, load_point_cloud
from src.distance.confocal import confocal_distance
from src.distance.measures import SweepLine, algebraic_distance, distance_sweep, sampson_distance
from src.distance.oracle import project_point_oracle
from src.engine.manifest import RunManifest, manifest_from_args, write_manifest
from src.errors import ConfocalError, FileAccessError, NotAnEllipse, UndefinedAtCriticalPoint
from src.fitters.lm import FitResult, LMConfig
from src.fitters.registry import get_fitter
from src.simulate.benchmark import FitSuite, run_distance_benchmark, run_fit_benchmark
from src.simulate.experiments import load_experiments
from src.simulate.metrics import rmse
from src.simulate.raster import SimConfig, rasterize_ellipse
from src.simulate.records import (
    SCHEMA_VERSION,
    read_points,
    write_points,
    write_records_csv,
    write_records_json,
    write_table,
    write_table_csv,
)

logger = logging.getLogger(__name__)

RHO_FIELDS = ("x_c", "y_c", "a_e", "b_e", "theta")
SWEEP_COLUMNS = ["t", "x", "y", "algebraic", "sampson", "confocal", "oracle"]
UNDEFINED = "undefined"


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag any library error raised inside the block with the pipeline step name."""
    try:
        yield
    except ConfocalError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    except OSError as exc:
        error = FileAccessError(f"{exc.filename or 'file'}: {exc.strerror or exc}")
        error.stage = name
        raise error from exc


def _manifest(args: argparse.Namespace) -> RunManifest:
    return manifest_from_args(args.subcommand, vars(args))


def _rho_dict(rho: GeometricEllipse) -> dict[str, float]:
    return dict(zip(RHO_FIELDS, rho.as_array().tolist()))


def _print_json(doc: dict[str, Any]) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _lm_config(args: argparse.Namespace) -> LMConfig:
    """Experiment-file LM defaults with any CLI overrides applied."""
    defaults = load_experiments().lm.to_dict()
    overrides = {
        "lambda0": args.lambda0,
        "nu0": args.nu0,
        "gamma": args.gamma,
        "max_iters": args.max_iters,
        "rel_tol": args.rel_tol,
        "max_extent_ratio": args.max_extent_ratio,
    }
    defaults.update({key: value for key, value in overrides.items() if value is not None})
    return LMConfig(**defaults)


# =============================================================================
# FIT
# =============================================================================

def cmd_fit(args: argparse.Namespace) -> int:
    with stage("read points"):
        xy = read_points(args.points)
    with stage("configure"):
        config = _lm_config(args)
        fitter = get_fitter(args.method)
    logger.info("fitting %d points from %s with %s", len(xy), args.points, fitter.label)

    with stage("fit"):
        try:
            result: FitResult = fitter(xy, config)
        except NotAnEllipse as exc:
            raise NotAnEllipse(f"fit is not an ellipse ({exc})") from exc
    with stage("evaluate"):
        error = rmse(result.ellipse, xy)

    status = result.status.name.lower()
    if args.json:
        manifest = _manifest(args)
        _print_json({
            "schema": SCHEMA_VERSION,
            "method": fitter.name,
            "rho": _rho_dict(result.ellipse),
            "iterations": result.iterations,
            "status": status,
            "final_sd": result.final_sd,
            "rmse": error,
            "lm": config.to_dict(),
            "manifest": manifest.to_dict(),
        })
        return 0

    print(f"method      {fitter.label}")
    for key, value in _rho_dict(result.ellipse).items():
        print(f"{key:<11} {value:.12g}")
    print(f"iterations  {result.iterations}")
    print(f"status      {status}")
    print(f"final_sd    {result.final_sd:.6e}")
    print(f"rmse        {error:.6e}")
    return 0


# =============================================================================
# DISTANCE
# =============================================================================

def _point_distances(rho: GeometricEllipse, p: Point2) -> dict[str, Optional[float]]:
    tau = geometric_to_algebraic(rho, normalize=False)
    try:
        sampson: Optional[float] = sampson_distance(tau, p)
    except UndefinedAtCriticalPoint:
        sampson = None
    return {
        "algebraic": algebraic_distance(tau, p),
        "sampson": sampson,
        "confocal": confocal_distance(rho, p).norm,
        "oracle": project_point_oracle(rho, p).distance,
    }


def _sweep_cell(value: float) -> Any:
    return value if math.isfinite(value) else UNDEFINED


def cmd_distance(args: argparse.Namespace) -> int:
    with stage("parse ellipse"):
        rho = GeometricEllipse(*args.rho)

    if args.sweep is None:
        with stage("parse point"):
            p = Point2(*args.point)
        with stage("distance"):
            distances = _point_distances(rho, p)
        if args.json:
            _print_json({
                "schema": SCHEMA_VERSION,
                "rho": _rho_dict(rho),
                "point": {"x": p.x, "y": p.y},
                "distances": distances,
                "manifest": _manifest(args).to_dict(),
            })
            return 0
        print("measure     distance")
        for name, value in distances.items():
            print(f"{name:<11} {UNDEFINED if value is None else format(value, '.12g')}")
        return 0

    line = SweepLine(args.sweep)
    with stage("sweep"):
        rows = distance_sweep(rho, line, args.samples)
    table = [
        [r.t, r.x, r.y, r.algebraic, _sweep_cell(r.sampson), r.confocal, r.oracle]
        for r in rows
    ]

    if args.out is not None:
        with stage("write sweep"):
            write_table_csv(args.out, SWEEP_COLUMNS, table)
            write_manifest(args.out, _manifest(args))
        logger.info("wrote %d sweep rows to %s", len(table), args.out)
    if args.json:
        _print_json({
            "schema": SCHEMA_VERSION,
            "rho": _rho_dict(rho),
            "sweep": line.value,
            "rows": [
                {**dict(zip(SWEEP_COLUMNS, row)), "sampson": None if row[4] == UNDEFINED else row[4]}
                for row in table
            ],
            "manifest": _manifest(args).to_dict(),
        })
    elif args.out is None:
        write_table(sys.stdout, SWEEP_COLUMNS, table)
    return 0


# =============================================================================
# SIMULATE
# =============================================================================

def cmd_simulate(args: argparse.Namespace) -> int:
    with stage("configure"):
        config = SimConfig(
            GeometricEllipse(*args.rho),
            alpha_s=args.arc_start,
            alpha_f=args.arc_end,
            sigma=args.sigma,
            seed=args.seed,
        )
    with stage("rasterize"):
        points = rasterize_ellipse(config)
    with stage("write points"):
        write_points(args.out, points, config.header())
        write_manifest(args.out, _manifest(args))
    print(f"wrote {len(points)} points to {args.out} (seed {args.seed})")
    return 0


# =============================================================================
# BENCHMARKS
# =============================================================================

def _write_records(args: argparse.Namespace, records: list) -> None:
    manifest = _manifest(args)
    with stage("write results"):
        write_records_csv(args.out, records)
        write_manifest(args.out, manifest)
        if args.json_out is not None:
            write_records_json(args.json_out, records, manifest.to_dict())
            write_manifest(args.json_out, manifest)


def cmd_bench_distance(args: argparse.Namespace) -> int:
    with stage("distance benchmark"):
        records = run_distance_benchmark(args.n, seed=args.seed, threads=args.threads)
    _write_records(args, records)
    print(f"wrote {len(records)} records to {args.out} (seed {args.seed})")
    return 0


def cmd_bench_fit(args: argparse.Namespace) -> int:
    with stage("fit benchmark"):
        records = run_fit_benchmark(
            FitSuite(args.suite),
            args.repeats,
            seed=args.seed,
            configs=args.configs,
            threads=args.threads,
        )
    _write_records(args, records)
    print(f"wrote {len(records)} records to {args.out} (seed {args.seed})")
    return 0


# =============================================================================
# CYLINDER
# =============================================================================

def cmd_cylinder(args: argparse.Namespace) -> int:
    with stage("read cloud"):
        cloud = load_point_cloud(args.cloud)
    with stage("read reference"):
        reference = load_cylinder_params(args.reference)

    # Record the effective values in the manifest
    defaults = load_experiments().cylinder
    if args.band is None:
        args.band = defaults.band
    if args.max_points is None:
        args.max_points = defaults.max_points
    if args.fitters is None:
        args.fitters = defaults.fitters

    with stage("cylinder benchmark"):
        rows = run_cylinder_benchmark(
            cloud,
            reference,
            args.planes,
            seed=args.seed,
            fitters=args.fitters,
            band=args.band,
            max_points=args.max_points,
            threads=args.threads,
        )
    with stage("write results"):
        write_table_csv(args.out, CYLINDER_COLUMNS, [row.as_row() for row in rows])
        write_manifest(args.out, _manifest(args))
    print(f"wrote {len(rows)} rows to {args.out} (seed {args.seed})")
    return 0


# ============================================================================
# DISPATCH
# ============================================================================

COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "fit": cmd_fit,
    "distance": cmd_distance,
    "simulate": cmd_simulate,
    "bench-distance": cmd_bench_distance,
    "bench-fit": cmd_bench_fit,
    "cylinder": cmd_cylinder,
}


def execute(args: argparse.Namespace) -> int:
    """
    Run the selected subcommand. Library errors are reported on standard
    error as 'error [<stage>]: <message>' and mapped to their exit code.
    """
    try:
        return COMMANDS[args.subcommand](args)
    except ConfocalError as exc:
        print(f"error [{exc.stage or args.subcommand}]: {exc}", file=sys.stderr)
        return exc.exit_code
