# Engine package
from src.engine.arguments import build_parser, parse_point, parse_rho
from src.engine.commands import COMMANDS, execute, stage
from src.engine.manifest import RunManifest, manifest_from_args, manifest_path, write_manifest

__all__ = [
    "COMMANDS",
    "RunManifest",
    "build_parser",
    "execute",
    "manifest_from_args",
    "manifest_path",
    "parse_point",
    "parse_rho",
    "stage",
    "write_manifest",
]
