"""KFLD files, sidecars and scan export."""

import csv
import json

import numpy as np
import pytest

from fields.field import from_function
from fields.grid import make_grid
from loaders.field_io import (
    HEADER,
    MAGIC,
    VERSION,
    decode_field,
    encode_field,
    export_scan,
    read_field,
    read_json,
    write_field,
    write_scan,
    write_solution,
)
from utils.errors import FieldFormatError


@pytest.fixture
def field_2d():
    grid = make_grid(2, 5.0, 32)
    return from_function(grid, lambda x, y: np.exp(-(x**2) - 2.0 * y**2) * (1.0 + x))


def test_kfld_file_preserves_samples_bitwise(tmp_path, field_2d):
    path = write_field(tmp_path / "u.kfld", field_2d)
    loaded = read_field(path)

    assert loaded.grid == field_2d.grid
    np.testing.assert_array_equal(loaded.samples, field_2d.samples)
    assert path.stat().st_size == HEADER.size + 8 * 32**2


def test_kfld_rejects_bad_payloads(field_2d):
    payload = encode_field(field_2d)
    with pytest.raises(FieldFormatError):
        decode_field(b"XXXX" + payload[4:])
    with pytest.raises(FieldFormatError):
        decode_field(payload[:-8])
    with pytest.raises(FieldFormatError):
        decode_field(payload[:10])


def test_read_field_missing_file(tmp_path):
    with pytest.raises(FieldFormatError) as excinfo:
        read_field(tmp_path / "missing.kfld")
    assert "missing.kfld" in str(excinfo.value)


def test_write_solution_links_sidecar(tmp_path, field_2d):
    kfld = write_solution(tmp_path, field_2d, {"level": np.float64(-0.5), "lambda": 1.0})
    sidecar = read_json(tmp_path / "solution.json")

    assert kfld.name == "solution.kfld"
    assert sidecar["field_file"] == "solution.kfld"
    assert sidecar["level"] == -0.5


def test_export_phi_scan_to_csv(tmp_path):
    # Setup
    rows = [(0.5, -0.1, 0.2), (1.0, 0.3, 0.4)]
    scan = write_scan(tmp_path / "phi_scan.json", "phi_scan", ["t", "phi", "psi"], rows)

    # Test function
    target = export_scan(scan, "csv")

    # Verify results
    with target.open() as handle:
        table = list(csv.reader(handle))
    assert table[0] == ["t", "phi", "psi"]
    assert [float(v) for v in table[2]] == [1.0, 0.3, 0.4]


def test_export_lattice_to_json_records(tmp_path):
    scan = write_scan(tmp_path / "lattice.json", "lattice", ["y1", "s", "energy"], [(0.0, 1.0, 2.0)])
    target = export_scan(scan, "json", tmp_path / "out.json")

    payload = json.loads(target.read_text())
    assert payload["kind"] == "lattice"
    assert payload["records"] == [{"y1": 0.0, "s": 1.0, "energy": 2.0}]


def test_export_rejects_unknown_or_missing_artifacts(tmp_path):
    (tmp_path / "other.json").write_text(json.dumps({"kind": "report", "columns": [], "rows": []}))
    with pytest.raises(FieldFormatError):
        export_scan(tmp_path / "other.json")
    with pytest.raises(FieldFormatError) as excinfo:
        export_scan(tmp_path / "nope.json")
    assert "nope.json" in str(excinfo.value)
    with pytest.raises(ValueError):
        write_scan(tmp_path / "bad.json", "histogram", ["x"], [])


def test_kfld_loads_any_point_count_the_header_declares():
    # Setup
    samples = np.linspace(-1.0, 1.0, 15)
    payload = HEADER.pack(MAGIC, VERSION, 1, 15, 2.0) + samples.astype("<f8").tobytes()

    # Test function
    loaded = decode_field(payload)

    # Verify results
    assert loaded.grid.points_per_dim == 15
    assert loaded.grid.half_width == 2.0
    np.testing.assert_array_equal(loaded.samples, samples)


def test_kfld_rejects_a_nonpositive_half_width():
    payload = HEADER.pack(MAGIC, VERSION, 1, 16, -1.0) + np.zeros(16).astype("<f8").tobytes()
    with pytest.raises(FieldFormatError) as excinfo:
        decode_field(payload)
    assert "half width" in str(excinfo.value)


def test_export_fiber_scan_to_csv(tmp_path):
    rows = [(0.5, 0.12), (1.0, 0.31), (2.0, -0.4)]
    scan = write_scan(tmp_path / "fiber_scan.json", "fiber_scan", ["t", "energy"], rows)

    with export_scan(scan, "csv").open() as handle:
        table = list(csv.reader(handle))

    assert table[0] == ["t", "energy"]
    assert [float(v) for v in table[3]] == [2.0, -0.4]
