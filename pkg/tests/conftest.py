"""Shared grids, constants and potentials for the test suite."""

import numpy as np
import pytest

from fields.field import from_function
from fields.grid import make_grid
from functionals.params import KirchhoffParams
from landscape.thresholds import landscape_threshold
from potentials.families import PotentialSpec
from potentials.norms import potential_norms
from utils.run_context import get_run_context


@pytest.fixture(autouse=True)
def fresh_run_context():
    """Every test starts without cached ground states or constants."""
    get_run_context().clear()
    yield
    get_run_context().clear()


@pytest.fixture
def grid_1d():
    return make_grid(1, 20.0, 1024)


@pytest.fixture
def grid_2d():
    return make_grid(2, 12.0, 64)


@pytest.fixture
def gaussian_1d(grid_1d):
    """Unit-mass Gaussian pi^{-1/4} exp(-x^2/2)."""
    return from_function(grid_1d, lambda x: np.pi ** -0.25 * np.exp(-0.5 * x**2))


@pytest.fixture
def subcritical_params():
    return KirchhoffParams(dim=1, a=1.0, b=1.0, c=1.0, p=3.0, q=1.5)


@pytest.fixture
def supercritical_params():
    return KirchhoffParams(dim=1, a=1.0, b=1.0, c=1.0, p=12.0, q=1.5)


@pytest.fixture
def subcritical_grid():
    return make_grid(1, 40.0, 512)


@pytest.fixture
def supercritical_grid():
    return make_grid(1, 3.0, 2048)


@pytest.fixture
def gaussian_bump():
    return PotentialSpec(family="gaussian", sign="nonneg", h0=0.1, width=1.0)


@pytest.fixture
def gaussian_well():
    return PotentialSpec(family="gaussian", sign="nonpos", h0=0.1, width=1.0)


@pytest.fixture
def rational_well():
    return PotentialSpec(family="rational_decay", sign="nonpos", h0=0.1, decay_s=1.0)


@pytest.fixture
def landscape_bump(supercritical_params, supercritical_grid):
    """Gaussian h >= 0 at 10% of the landscape threshold for p = 12."""
    c_np = get_run_context().gn_constant(1, 12.0, supercritical_grid)
    threshold = landscape_threshold(supercritical_params, c_np)
    unit = PotentialSpec(family="gaussian", h0=1.0, width=1.0)
    norm = potential_norms(unit, 1.5, 12.0, supercritical_grid).norm_p_over_pmq
    return unit.with_amplitude(0.1 * threshold / norm)
