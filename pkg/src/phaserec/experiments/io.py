"""CSV result tables and JSON run manifests.

Floats are serialized with ``repr``, the shortest representation that
round-trips exactly in binary64, so written tables can be read back and
compared bit-for-bit.  Each command writes one or more CSV tables with a
fixed header plus a ``manifest.json`` describing the run (config echo and
hash, master seed, versions, diagnostics, wall-clock).  Only the manifest
carries timing; CSV bytes are a pure function of (config, master seed).
"""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import jsonschema
import numpy as np

__all__ = [
    "SchemaError",
    "format_value",
    "write_csv",
    "read_csv",
    "MANIFEST_SCHEMA",
    "build_manifest",
    "write_manifest",
    "validate_manifest",
]


class SchemaError(ValueError):
    """A table or manifest does not match its documented shape."""


def format_value(value) -> str:
    """Serialize one cell: shortest exact form for floats, plain otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str | Path, header: list[str], rows: list) -> Path:
    """Write a result table with a fixed header; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise SchemaError(
                    f"row width {len(row)} does not match header width {len(header)}"
                )
            writer.writerow([format_value(v) for v in row])
    return path


def read_csv(
    path: str | Path, expected_header: list[str] | None = None
) -> tuple[list[str], list[list[str]]]:
    """Read a table back as strings; checks the header when given."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty table") from None
        rows = [row for row in reader]
    if expected_header is not None and header != list(expected_header):
        raise SchemaError(
            f"{path}: header {header} does not match expected {list(expected_header)}"
        )
    for row in rows:
        if len(row) != len(header):
            raise SchemaError(f"{path}: ragged row {row}")
    return header, rows


MANIFEST_SCHEMA = {
    "type": "object",
    "required": [
        "command",
        "config",
        "config_hash",
        "seed",
        "threads",
        "versions",
        "outputs",
        "diagnostics",
        "wall_clock_seconds",
    ],
    "properties": {
        "command": {"type": "string"},
        "config": {"type": "object", "additionalProperties": {"type": "string"}},
        "config_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1},
        "versions": {
            "type": "object",
            "required": ["package", "python", "numpy"],
            "additionalProperties": {"type": "string"},
        },
        "outputs": {"type": "array", "items": {"type": "string"}},
        "diagnostics": {"type": "object"},
        "wall_clock_seconds": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}


def validate_manifest(manifest: dict) -> None:
    """Raise :class:`SchemaError` if the manifest does not fit the schema."""
    try:
        jsonschema.validate(manifest, MANIFEST_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"invalid manifest: {exc.message}") from exc


def _jsonsafe(value):
    """Convert numpy scalars and arrays to plain JSON types, recursively."""
    if isinstance(value, dict):
        return {str(k): _jsonsafe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonsafe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonsafe(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # keep the manifest strict JSON: inf/nan become strings
        return value if np.isfinite(value) else repr(value)
    return value


def build_manifest(
    command: str,
    config_fields: dict[str, str],
    config_hash: str,
    seed: int,
    threads: int,
    outputs: list[str],
    diagnostics: dict,
    wall_clock_seconds: float,
) -> dict:
    from .. import __version__

    return {
        "command": command,
        "config": dict(config_fields),
        "config_hash": config_hash,
        "seed": int(seed),
        "threads": int(threads),
        "versions": {
            "package": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "outputs": list(outputs),
        "diagnostics": _jsonsafe(diagnostics),
        "wall_clock_seconds": float(wall_clock_seconds),
    }


def write_manifest(path: str | Path, manifest: dict) -> Path:
    """Validate and write ``manifest.json``."""
    validate_manifest(manifest)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True, allow_nan=False) + "\n"
    )
    return path
