"""
Command-line grammar - subcommands, flags and value parsers
"""

from __future__ import annotations

import argparse
import math
from pathlib import Path

from src import __version__
from src.distance.measures import SweepLine
from src.fitters.registry import ALL_FITTERS
from src.simulate.benchmark import FitSuite


def _floats(text: str, count: int, what: str) -> tuple[float, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"{what} needs {count} comma-separated numbers, got '{text}'")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be numeric, got '{text}'") from None
    if not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"{what} must be finite, got '{text}'")
    return values


def parse_rho(text: str) -> tuple[float, ...]:
    """'xc,yc,a,b,theta' -> 5 floats."""
    return _floats(text, 5, "--rho")


def parse_point(text: str) -> tuple[float, ...]:
    """'x,y' -> 2 floats."""
    return _floats(text, 2, "--point")


def parse_fitters(text: str) -> tuple[str, ...]:
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    unknown = [n for n in names if n not in ALL_FITTERS]
    if not names or unknown:
        raise argparse.ArgumentTypeError(
            f"unknown fitter(s) {', '.join(unknown) or text!r}; choose from {', '.join(ALL_FITTERS)}"
        )
    return names


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def non_negative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{text}'") from None
    if not (math.isfinite(value) and value >= 0):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _add_lm_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("Levenberg-Marquardt")
    group.add_argument("--lambda0", type=float, default=None, help="initial damping (default 0.5)")
    group.add_argument("--nu0", type=float, default=None, help="damping increment (default 10)")
    group.add_argument("--gamma", type=float, default=None, help="damping decrement (default 3)")
    group.add_argument("--max-iters", type=positive_int, default=None, help="iteration limit (default 50)")
    group.add_argument("--rel-tol", type=float, default=None, help="relative SD change treated as converged")
    group.add_argument("--max-extent-ratio", type=float, default=None,
                       help="largest semi-major as a multiple of the data extent (default 1; inf disables)")


def _add_bench_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=non_negative_int, default=0, help="master seed (default 0)")
    parser.add_argument("--threads", type=positive_int, default=1, help="worker threads (default 1)")
    parser.add_argument("--out", type=Path, required=True, help="CSV output path")
    parser.add_argument("--json-out", type=Path, default=None, help="optional JSON output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Ellipse fitting with the confocal hyperbola distance.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for per-iteration traces")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    # fit
    fit = sub.add_parser("fit", help="fit an ellipse to a point file", allow_abbrev=False)
    fit.add_argument("--points", type=Path, required=True, help="two-column point file")
    fit.add_argument("--method", choices=sorted(ALL_FITTERS), default="confocal")
    fit.add_argument("--json", action="store_true", help="emit JSON on standard output")
    _add_lm_flags(fit)

    # distance
    dist = sub.add_parser("distance", help="compare distance measures", allow_abbrev=False)
    dist.add_argument("--rho", type=parse_rho, required=True, help="xc,yc,a,b,theta")
    where = dist.add_mutually_exclusive_group(required=True)
    where.add_argument("--point", type=parse_point, help="x,y")
    where.add_argument("--sweep", choices=[line.value for line in SweepLine],
                       help="evaluate along a line of the ellipse frame")
    dist.add_argument("--samples", type=positive_int, default=201, help="sweep sample count (default 201)")
    dist.add_argument("--out", type=Path, default=None, help="sweep CSV path (default standard output)")
    dist.add_argument("--json", action="store_true", help="emit JSON on standard output")

    # simulate
    sim = sub.add_parser("simulate", help="generate simulated edge points", allow_abbrev=False)
    sim.add_argument("--rho", type=parse_rho, required=True, help="xc,yc,a,b,theta (pixels, radians)")
    sim.add_argument("--arc-start", type=float, default=0.0, help="arc start angle (radians)")
    sim.add_argument("--arc-end", type=float, default=2.0 * math.pi, help="arc end angle (radians)")
    sim.add_argument("--sigma", type=non_negative_float, required=True, help="noise standard deviation (pixels)")
    sim.add_argument("--seed", type=non_negative_int, default=0, help="seed (default 0)")
    sim.add_argument("--out", type=Path, required=True, help="point file to write")

    # bench-distance
    bd = sub.add_parser("bench-distance", help="distance accuracy benchmark", allow_abbrev=False)
    bd.add_argument("--n", type=positive_int, required=True, help="number of random ellipses")
    _add_bench_flags(bd)

    # bench-fit
    bf = sub.add_parser("bench-fit", help="fitter accuracy benchmark", allow_abbrev=False)
    bf.add_argument("--suite", choices=[s.value for s in FitSuite], required=True)
    bf.add_argument("--repeats", type=positive_int, required=True, help="repeats per configuration")
    bf.add_argument("--configs", type=positive_int, default=200, help="random configurations (overall suite)")
    _add_bench_flags(bf)

    # cylinder
    cyl = sub.add_parser("cylinder", help="cylinder recovery benchmark", allow_abbrev=False)
    cyl.add_argument("--cloud", type=Path, required=True, help="x y z point cloud (metres)")
    cyl.add_argument("--reference", type=Path, required=True, help="reference cylinder JSON")
    cyl.add_argument("--planes", type=positive_int, required=True, help="number of random planes")
    cyl.add_argument("--seed", type=non_negative_int, default=0, help="master seed (default 0)")
    cyl.add_argument("--band", type=non_negative_float, default=None, help="plane band half-width (m)")
    cyl.add_argument("--max-points", type=positive_int, default=None, help="points per section")
    cyl.add_argument("--fitters", type=parse_fitters, default=None, help="comma-separated fitter names")
    cyl.add_argument("--threads", type=positive_int, default=1, help="worker threads (default 1)")
    cyl.add_argument("--out", type=Path, required=True, help="CSV output path")

    return parser
