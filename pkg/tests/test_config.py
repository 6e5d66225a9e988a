"""TOML run configuration and its validation errors."""

import pytest

from utils.config import load_config, parse_config
from utils.errors import ConfigError, RegimeError


def write_toml(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text)
    return path


def test_empty_configuration_is_a_default_limit_run(tmp_path):
    config = load_config(write_toml(tmp_path, ""))

    assert config.solver.mode == "limit"
    assert config.kirchhoff_params().regime == "subcritical"
    grid = config.grid.to_grid()
    assert (grid.dim, grid.half_width, grid.points_per_dim) == (1, 20.0, 1024)
    assert load_config() == config


def test_full_configuration(tmp_path):
    # Setup
    text = """
[grid]
dim = 2
points_per_dim = 128

[params]
p = 7.0
q = 1.2

[potential]
family = "gaussian"
sign = "nonpos"
h0 = 0.2

[solver]
mode = "link"
R = 3.0
lattice_radii = 9
"""

    # Test function
    config = load_config(write_toml(tmp_path, text))

    # Verify results
    assert config.kirchhoff_params().regime == "supercritical"
    assert config.grid.to_grid().half_width == 15.0
    assert config.potential.sign == "nonpos"
    assert config.solver.grid_Q == (9, 16, 25)


def test_q_out_of_range_names_the_field(tmp_path):
    with pytest.raises(ConfigError) as excinfo:
        load_config(write_toml(tmp_path, "[params]\nq = 2.5\n"))

    assert "params.q" in excinfo.value.details["fields"]
    assert "1 <= q < 2" in str(excinfo.value)
    assert excinfo.value.exit_code == 2


def test_mode_must_match_the_regime():
    with pytest.raises(RegimeError) as excinfo:
        parse_config({"params": {"p": 12.0}, "solver": {"mode": "min"}})
    assert excinfo.value.details["field"] == "solver.mode"
    with pytest.raises(RegimeError):
        parse_config({"params": {"p": 3.0}, "solver": {"mode": "mp"}})


def test_critical_band_is_rejected():
    with pytest.raises(ConfigError):
        parse_config({"params": {"p": 8.0}})


def test_unknown_keys_and_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        parse_config({"solver": {"speed": "fast"}})
    with pytest.raises(ConfigError):
        load_config(write_toml(tmp_path, "[params\np = 3"))
    with pytest.raises(ConfigError) as excinfo:
        load_config(tmp_path / "absent.toml")
    assert "absent.toml" in str(excinfo.value)


def test_mode_argument_and_overrides(tmp_path):
    config = load_config(write_toml(tmp_path, "[solver]\nmode = \"limit\"\n"), mode="gn")
    assert config.solver.mode == "gn"

    updated = config.with_overrides(seed=7, threads=None, out=str(tmp_path / "out"))
    assert updated.solver.seed == 7
    assert updated.solver.threads == config.solver.threads
    assert updated.output.directory == str(tmp_path / "out")


def test_grid_interpolation_and_output_formats(tmp_path):
    text = '[grid]\ninterpolation = "linear"\n\n[output]\nformats = ["csv", "json"]\n'
    config = load_config(write_toml(tmp_path, text))

    assert config.grid.to_grid().interpolation == "linear"
    assert config.output.formats == ["csv", "json"]
    assert parse_config({}).output.formats == ["csv"]
    with pytest.raises(ConfigError):
        parse_config({"output": {"formats": ["xlsx"]}})
