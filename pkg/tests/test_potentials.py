"""Perturbation families, their norms and the assumption report."""

import numpy as np
import pytest

from fields.grid import make_grid
from landscape.thresholds import landscape_threshold, linking_threshold, radial_derivative_threshold
from potentials.assumptions import check_assumptions
from potentials.families import (
    Bump,
    PotentialSpec,
    eval_potential,
    eval_radial_derivative,
    potential_on_grid,
    radial_derivative_on_grid,
)
from potentials.norms import potential_norms, quadrature_norms, upsilon_bound
from utils.errors import AssumptionError, PotentialError


@pytest.fixture
def grid_wide():
    return make_grid(1, 60.0, 4096)


def test_signs_and_values(gaussian_bump, gaussian_well):
    assert eval_potential(gaussian_bump, [0.0]) == pytest.approx(0.1)
    assert eval_potential(gaussian_well, [0.0]) == pytest.approx(-0.1)
    assert eval_potential(gaussian_bump, [1.0]) == pytest.approx(0.1 * np.exp(-1.0))
    assert eval_potential(PotentialSpec(), [3.0]) == 0.0


@pytest.mark.parametrize(
    "spec",
    [
        PotentialSpec(family="gaussian", h0=0.7, width=1.3),
        PotentialSpec(family="rational_decay", sign="nonpos", h0=0.4, decay_s=1.5),
        PotentialSpec(
            family="multibump",
            h0=1.0,
            bumps=(Bump(center=(0.5,), radius=1.0), Bump(center=(-0.5,), radius=1.0)),
        ),
    ],
)
def test_radial_derivative_matches_central_difference(spec):
    for x in (0.3, 0.9, 1.2):
        step = 1e-6
        derivative = (eval_potential(spec, [x + step]) - eval_potential(spec, [x - step])) / (2 * step)
        assert eval_radial_derivative(spec, [x]) == pytest.approx(x * derivative, rel=1e-5, abs=1e-9)


def test_closed_form_norms_match_quadrature(grid_wide):
    gaussian = PotentialSpec(family="gaussian", h0=0.5, width=1.0)
    closed = potential_norms(gaussian, 1.5, 12.0, grid_wide)
    numeric = quadrature_norms(gaussian, 1.5, 12.0, grid_wide)
    assert closed.norm_2_over_2mq == pytest.approx(numeric.norm_2_over_2mq, rel=1e-6)
    assert closed.norm_p_over_pmq == pytest.approx(numeric.norm_p_over_pmq, rel=1e-6)
    assert closed.norm_radial == pytest.approx(numeric.norm_radial, rel=1e-6)

    # The L^{p/(p-q)} tail of the rational family is too heavy for the box
    rational = PotentialSpec(family="rational_decay", sign="nonpos", h0=0.5, decay_s=1.0)
    closed = potential_norms(rational, 1.5, 12.0, grid_wide)
    numeric = quadrature_norms(rational, 1.5, 12.0, grid_wide)
    assert closed.norm_2_over_2mq == pytest.approx(numeric.norm_2_over_2mq, rel=1e-6)
    assert closed.norm_radial == pytest.approx(numeric.norm_radial, rel=1e-6)


def test_rational_decay_integrability_guard(grid_wide):
    slow = PotentialSpec(family="rational_decay", h0=1.0, decay_s=0.1)
    with pytest.raises(PotentialError):
        potential_norms(slow, 1.5, 3.0, grid_wide)


def test_upsilon(rational_well, gaussian_well):
    assert upsilon_bound(rational_well) == 2.0
    assert upsilon_bound(gaussian_well) is None
    assert upsilon_bound(PotentialSpec()) == 0.0


def test_multibump_symmetry_and_validation():
    pair = PotentialSpec(
        family="multibump",
        h0=1.0,
        bumps=(Bump(center=(1.0,), radius=0.5), Bump(center=(-1.0,), radius=0.5)),
    )
    single = PotentialSpec(family="multibump", h0=1.0, bumps=(Bump(center=(1.0,), radius=0.5),))
    assert pair.is_even
    assert not single.is_even
    assert eval_potential(single, [2.0]) == 0.0
    with pytest.raises(ValueError):
        PotentialSpec(family="multibump", h0=1.0)


def test_potential_on_grid_is_cached_and_read_only(grid_wide, gaussian_bump):
    values = potential_on_grid(gaussian_bump, grid_wide)
    assert potential_on_grid(gaussian_bump, grid_wide) is values
    with pytest.raises(ValueError):
        values[0] = 1.0


def test_subcritical_report_skips_supercritical_conditions(grid_wide, gaussian_bump, subcritical_params):
    report = check_assumptions(gaussian_bump, subcritical_params, grid=grid_wide)

    assert report["potential_integrable"].passed
    assert report["landscape_gap"].status == "not-applicable"
    assert report["radial_ratio_bounded"].status == "not-applicable"
    report.require("potential_integrable")


def test_linking_bound_against_its_threshold(grid_wide, rational_well, supercritical_params):
    # Setup
    m_c = 2.0
    threshold = linking_threshold(supercritical_params, m_c, 2.0)
    norm_unit = potential_norms(rational_well.with_amplitude(1.0), 1.5, 12.0, grid_wide).norm_2_over_2mq
    below = rational_well.with_amplitude(0.5 * threshold / norm_unit)
    above = rational_well.with_amplitude(2.0 * threshold / norm_unit)

    # Test function
    ok = check_assumptions(below, supercritical_params, m_c, grid=grid_wide, c_np=1.0)
    bad = check_assumptions(above, supercritical_params, m_c, grid=grid_wide, c_np=1.0)

    # Verify results
    assert threshold == pytest.approx(14.0 / 41.0 * 1.5 * m_c)
    assert ok["linking_bound"].passed
    assert ok["radial_ratio_bounded"].passed
    assert not bad["linking_bound"].passed
    assert bad["linking_bound"].margin < 0
    with pytest.raises(AssumptionError):
        bad.require("linking_bound")


@pytest.mark.parametrize(
    "spec",
    [
        PotentialSpec(family="gaussian", h0=1.0, width=1.3),
        PotentialSpec(family="rational_decay", sign="nonpos", h0=1.0, decay_s=1.0),
    ],
)
def test_norms_scale_linearly_in_the_amplitude(grid_wide, spec):
    unit = potential_norms(spec, 1.5, 12.0, grid_wide)
    for h0 in (0.25, 3.0):
        scaled = potential_norms(spec.with_amplitude(h0), 1.5, 12.0, grid_wide)
        assert scaled.norm_2_over_2mq == pytest.approx(h0 * unit.norm_2_over_2mq, rel=1e-12)
        assert scaled.norm_p_over_pmq == pytest.approx(h0 * unit.norm_p_over_pmq, rel=1e-12)
        assert scaled.norm_radial == pytest.approx(h0 * unit.norm_radial, rel=1e-12)
        assert scaled.upsilon == unit.upsilon


def test_rational_decay_radial_ratio_holds_on_the_grid(grid_wide, rational_well):
    bound = potential_norms(rational_well, 1.5, 12.0, grid_wide).upsilon

    radial = np.abs(radial_derivative_on_grid(rational_well, grid_wide))
    values = np.abs(potential_on_grid(rational_well, grid_wide))

    assert bound == 2.0
    assert np.all(radial <= bound * values * (1.0 + 1e-12))
    assert np.max(radial / values) == pytest.approx(bound, rel=1e-3)


def test_gaussian_norm_for_q_equal_one(grid_wide):
    unit = PotentialSpec(family="gaussian", h0=1.0, width=1.0)

    closed = potential_norms(unit, 1.0, 12.0, grid_wide)
    numeric = quadrature_norms(unit, 1.0, 12.0, grid_wide)

    assert closed.norm_2_over_2mq == pytest.approx((np.pi / 2.0) ** 0.25, rel=1e-12)
    assert closed.norm_2_over_2mq == pytest.approx(1.11951, abs=1e-5)
    assert numeric.norm_2_over_2mq == pytest.approx(closed.norm_2_over_2mq, rel=1e-6)


def test_landscape_gap_fails_above_its_threshold(grid_wide, supercritical_params):
    # Setup
    unit = PotentialSpec(family="gaussian", h0=1.0, width=1.0)
    threshold = landscape_threshold(supercritical_params, 1.0)
    norm_unit = potential_norms(unit, 1.5, 12.0, grid_wide).norm_p_over_pmq

    # Test function
    ok = check_assumptions(
        unit.with_amplitude(0.5 * threshold / norm_unit), supercritical_params, grid=grid_wide, c_np=1.0
    )
    bad = check_assumptions(
        unit.with_amplitude(3.0 * threshold / norm_unit), supercritical_params, grid=grid_wide, c_np=1.0
    )

    # Verify results
    assert ok["landscape_gap"].passed
    assert ok["landscape_gap"].margin == pytest.approx(0.5 * threshold)
    assert not bad["landscape_gap"].passed
    assert bad["landscape_gap"].margin == pytest.approx(-2.0 * threshold)
    assert bad["radial_derivative_bound"].status == "not-applicable"
    with pytest.raises(AssumptionError):
        bad.require("landscape_gap")


def test_radial_derivative_bound_with_a_limit_level(grid_wide, supercritical_params):
    # Setup
    m_c = 2.0
    unit = PotentialSpec(family="gaussian", h0=1.0, width=1.0)
    threshold = radial_derivative_threshold(supercritical_params, m_c)
    radial_unit = potential_norms(unit, 1.5, 12.0, grid_wide).norm_radial

    # Test function
    ok = check_assumptions(
        unit.with_amplitude(0.5 * threshold / radial_unit), supercritical_params, m_c, grid=grid_wide, c_np=1.0
    )
    bad = check_assumptions(
        unit.with_amplitude(2.0 * threshold / radial_unit), supercritical_params, m_c, grid=grid_wide, c_np=1.0
    )

    # Verify results
    assert ok["radial_derivative_bound"].passed
    assert ok["radial_derivative_bound"].threshold == pytest.approx(threshold)
    assert not bad["radial_derivative_bound"].passed
    assert bad["radial_derivative_bound"].margin == pytest.approx(-threshold)
    assert bad["linking_bound"].status == "not-applicable"
