"""
Run manifests - record how every output artifact was produced
Written as JSON sidecars next to each output file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Mapping, Optional

from src import __version__
from src.errors import FileAccessError
from src.simulate.records import SCHEMA_VERSION

TOOL_NAME = "confocal-fit"
MANIFEST_SUFFIX = ".manifest.json"


@dataclass(frozen=True)
class RunManifest:
    """Tool version, subcommand, effective flags and master seed of one run."""
    subcommand: str
    flags: Mapping[str, Any]
    seed: Optional[int] = None
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "tool": TOOL_NAME,
            "version": self.version,
            "subcommand": self.subcommand,
            "flags": dict(self.flags),
            "seed": self.seed,
            "timestamp": self.timestamp,
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "value") and hasattr(value, "name"):
        return value.value
    return value


def manifest_from_args(subcommand: str, args: Mapping[str, Any]) -> RunManifest:
    """Build a manifest from parsed CLI arguments (callables are dropped)."""
    flags = {key: _jsonable(value) for key, value in sorted(args.items()) if not callable(value)}
    return RunManifest(subcommand, flags, flags.get("seed"))


def manifest_path(output: Path) -> Path:
    return Path(str(output) + MANIFEST_SUFFIX)


def write_manifest(output: Path, manifest: RunManifest) -> Path:
    """Write the sidecar manifest for output and return its path."""
    path = manifest_path(output)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest.to_dict(), f, indent=2)
            f.write("\n")
    except OSError as exc:
        raise FileAccessError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
