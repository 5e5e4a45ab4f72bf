"""
Benchmark records and text artifacts - CSV/JSON result tables and the
plain-text point file format
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence, TextIO

import numpy as np

from src.errors import FileAccessError, ParseError

SCHEMA_VERSION = 1

CSV_COLUMNS = ["suite", "parameter", "value", "method", "quantity", "n", "failures", "mean", "median", "p95"]

_SEPARATORS = re.compile(r"[,\s]+")


@dataclass
class BenchmarkRecord:
    """Samples of one quantity for one method at one configuration point."""
    suite: str
    parameter: str
    value: float
    method: str
    quantity: str
    samples: np.ndarray = field(default_factory=lambda: np.empty(0))
    failures: int = 0

    @property
    def n(self) -> int:
        return int(len(self.samples))

    def _stat(self, fn) -> float:
        return float(fn(self.samples)) if self.n else math.nan

    @property
    def mean(self) -> float:
        return self._stat(np.mean)

    @property
    def median(self) -> float:
        return self._stat(np.median)

    @property
    def p95(self) -> float:
        return self._stat(lambda s: np.percentile(np.sort(s), 95, method="linear"))

    def summary(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "parameter": self.parameter,
            "value": self.value,
            "method": self.method,
            "quantity": self.quantity,
            "n": self.n,
            "failures": self.failures,
            "mean": self.mean,
            "median": self.median,
            "p95": self.p95,
        }


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.10g}"
    return str(value)


def _json_number(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


# =============================================================================
# RESULT TABLES
# =============================================================================

def write_records_csv(path: Path, records: Iterable[BenchmarkRecord]) -> None:
    """One row per record, columns in CSV_COLUMNS order."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in records:
            summary = record.summary()
            writer.writerow([_fmt(summary[col]) for col in CSV_COLUMNS])


def records_document(records: Iterable[BenchmarkRecord], manifest: Optional[Mapping[str, Any]] = None) -> dict:
    """JSON-ready document mirroring the records; non-finite statistics become null."""
    doc: dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "records": [
            {key: _json_number(value) for key, value in record.summary().items()}
            for record in records
        ],
    }
    if manifest is not None:
        doc["manifest"] = dict(manifest)
    return doc


def write_records_json(path: Path, records: Iterable[BenchmarkRecord], manifest: Optional[Mapping[str, Any]] = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(records_document(records, manifest), f, indent=2)
        f.write("\n")


def write_table(stream: TextIO, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Plain CSV table with a header row, written to an open text stream."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def write_table_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        write_table(f, columns, rows)


# =============================================================================
# POINT FILES
# =============================================================================

def parse_numeric_rows(path: Path, width: int) -> tuple[np.ndarray, dict[str, str]]:
    """
    Read rows of `width` numbers separated by whitespace or commas.

    Lines starting with '#' are comments; '# key: value' comments are
    returned as the header. Blank lines are skipped.
    """
    header: dict[str, str] = {}
    rows: list[list[float]] = []
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line_number, raw in enumerate(f, start=1):
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, sep, value = line[1:].partition(":")
                    if sep:
                        header[key.strip()] = value.strip()
                    continue
                fields = [tok for tok in _SEPARATORS.split(line) if tok]
                if len(fields) != width:
                    raise ParseError(f"expected {width} values, found {len(fields)}", line_number)
                try:
                    row = [float(tok) for tok in fields]
                except ValueError as exc:
                    raise ParseError(f"not a number: {exc}", line_number) from exc
                if not all(math.isfinite(v) for v in row):
                    raise ParseError("non-finite coordinate", line_number)
                rows.append(row)
    except OSError as exc:
        raise FileAccessError(f"cannot read {path}: {exc.strerror or exc}") from exc

    return np.asarray(rows, dtype=float).reshape(-1, width), header


def read_points(path: Path) -> np.ndarray:
    """Two-column point file as an (N, 2) array."""
    points, _ = parse_numeric_rows(path, 2)
    return points


def read_point_header(path: Path) -> dict[str, str]:
    return parse_numeric_rows(path, 2)[1]


def write_points(path: Path, points: np.ndarray, header: Optional[Mapping[str, str]] = None) -> None:
    """Write '# key: value' header lines followed by one 'x y' line per point."""
    with open(path, "w", encoding="utf-8") as f:
        for key, value in (header or {}).items():
            f.write(f"# {key}: {value}\n")
        for x, y in np.asarray(points, dtype=float):
            f.write(f"{x:.17g} {y:.17g}\n")
