"""
Persistence for fields, sidecars and scan artifacts.

Fields are stored in the binary KFLD layout:

    magic b"KFLD" | version u8 = 1 | dim u8 | M u64 LE | half_width f64 LE |
    M^dim samples f64 LE, row-major

Solutions add a JSON sidecar next to the KFLD file. Scans (phi profiles,
fiber curves, linking lattices) are JSON documents with a kind, column names
and rows, and export to CSV for plotting.
"""

import csv
import json
import logging
import math
import struct
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from fields.field import Field
from fields.grid import Grid
from utils.errors import FieldFormatError

logger = logging.getLogger(__name__)

MAGIC = b"KFLD"
VERSION = 1
HEADER = struct.Struct("<4sBBQd")

SCAN_KINDS = ("phi_scan", "fiber_scan", "lattice")

PathLike = Union[str, Path]


def encode_field(field: Field) -> bytes:
    grid = field.grid
    header = HEADER.pack(MAGIC, VERSION, grid.dim, grid.points_per_dim, grid.half_width)
    return header + field.samples.astype("<f8").tobytes(order="C")


def decode_field(payload: bytes) -> Field:
    """
    Decode a KFLD byte string.

    Args:
        payload: Raw file content

    Returns:
        The stored Field on a freshly built Grid

    Raises:
        FieldFormatError: On bad magic, version, dimension, half width or length
    """
    if len(payload) < HEADER.size:
        raise FieldFormatError(f"KFLD payload too short ({len(payload)} bytes)")
    magic, version, dim, points, half_width = HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise FieldFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FieldFormatError(f"unsupported KFLD version {version}")
    if dim not in (1, 2, 3):
        raise FieldFormatError(f"KFLD dim {dim} out of range")
    if points < 1:
        raise FieldFormatError("KFLD header declares no samples")
    if not (math.isfinite(half_width) and half_width > 0):
        raise FieldFormatError(f"KFLD half width {half_width} is not a positive number")
    expected = HEADER.size + 8 * points**dim
    if len(payload) != expected:
        raise FieldFormatError(
            f"KFLD length {len(payload)} does not match header (expected {expected})"
        )
    samples = np.frombuffer(payload, dtype="<f8", offset=HEADER.size).astype(np.float64)
    # The format accepts any M; run grids add their own policy through make_grid
    grid = Grid(dim=dim, half_width=float(half_width), points_per_dim=int(points))
    return Field(grid, samples.reshape(grid.shape))


def write_field(path: PathLike, field: Field) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_field(field))
    return path


def read_field(path: PathLike) -> Field:
    path = Path(path)
    if not path.exists():
        raise FieldFormatError(f"field file not found: {path}", {"path": str(path)})
    return decode_field(path.read_bytes())


# =============================================================================
# JSON Artifacts
# =============================================================================


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, default=_to_builtin))
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise FieldFormatError(f"artifact not found: {path}", {"path": str(path)})
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FieldFormatError(f"invalid JSON in {path}: {e}", {"path": str(path)})


def write_solution(directory: PathLike, field: Field, sidecar: Dict[str, Any]) -> Path:
    """Write solution.kfld plus its solution.json sidecar; returns the KFLD path."""
    directory = Path(directory)
    kfld = write_field(directory / "solution.kfld", field)
    write_json(directory / "solution.json", {**sidecar, "field_file": kfld.name})
    return kfld


def write_scan(
    path: PathLike, kind: str, columns: Sequence[str], rows: Sequence[Sequence[float]]
) -> Path:
    if kind not in SCAN_KINDS:
        raise ValueError(f"unknown scan kind {kind!r}; expected one of {SCAN_KINDS}")
    return write_json(
        path,
        {"kind": kind, "columns": list(columns), "rows": [list(map(float, r)) for r in rows]},
    )


def export_scan(artifact: PathLike, fmt: str = "csv", out: Optional[PathLike] = None) -> Path:
    """
    Convert a stored scan into a tabular file for plotting.

    Args:
        artifact: Path to a scan JSON written by write_scan
        fmt: "csv" or "json"
        out: Destination path (defaults to the artifact path with the new suffix)

    Returns:
        Path of the written file

    Raises:
        FieldFormatError: If the artifact is missing or is not a scan
    """
    artifact = Path(artifact)
    payload = read_json(artifact)
    kind = payload.get("kind")
    if kind not in SCAN_KINDS:
        raise FieldFormatError(
            f"unknown artifact type {kind!r} in {artifact}", {"path": str(artifact)}
        )
    columns: List[str] = payload["columns"]
    rows = payload["rows"]

    if fmt == "json":
        target = Path(out) if out else artifact.with_name(artifact.stem + "_table.json")
        records = [dict(zip(columns, row)) for row in rows]
        return write_json(target, {"kind": kind, "records": records})
    if fmt != "csv":
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")

    target = Path(out) if out else artifact.with_suffix(".csv")
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    logger.info("exported %s scan with %d rows to %s", kind, len(rows), target)
    return target
