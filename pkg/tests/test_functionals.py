"""Kirchhoff constants, energies, the Pohozaev functional and multipliers."""

import numpy as np
import pytest
from pydantic import ValidationError

from fields.field import (
    from_function,
    grad_norm_sq,
    inner,
    l2_norm_array,
    mass,
    project_mass,
    random_smooth_field,
    scale_fiber,
    zeros,
)
from functionals.energy import (
    ZERO_POTENTIAL,
    constrained_gradient,
    el_residual,
    energy,
    energy_lambda,
    energy_limit,
    energy_limit_lambda,
    j_functional,
    j_limit,
    multiplier,
    pohozaev,
    pohozaev_scale,
)
from functionals.params import KirchhoffParams
from potentials.norms import potential_norms
from utils.errors import RegimeError, ZeroFieldError
from utils.run_context import get_run_context


def test_params_regimes():
    assert KirchhoffParams(dim=1, p=3.0).regime == "subcritical"
    assert KirchhoffParams(dim=1, p=12.0).regime == "supercritical"
    assert KirchhoffParams(dim=3, p=5.0).regime == "supercritical"
    assert KirchhoffParams(dim=2, p=3.0).p_bar == 6.0


def test_params_reject_critical_band_and_bad_exponents():
    with pytest.raises(RegimeError):
        KirchhoffParams(dim=1, p=8.0)
    with pytest.raises(ValidationError):
        KirchhoffParams(dim=1, q=2.5)
    with pytest.raises(ValidationError):
        KirchhoffParams(dim=3, p=6.5)
    with pytest.raises(ValidationError):
        KirchhoffParams(dim=1, a=0.0)


def test_with_mass_keeps_other_constants(supercritical_params):
    other = supercritical_params.with_mass(2.5)
    assert other.c == 2.5
    assert other.p == supercritical_params.p
    assert hash(other) != hash(supercritical_params)


def test_energy_breakdown_of_gaussian(gaussian_1d, gaussian_bump):
    params = KirchhoffParams(dim=1, p=4.0, q=1.5)
    breakdown = energy(gaussian_1d, params, gaussian_bump)

    assert breakdown.kinetic == pytest.approx(0.25, abs=1e-9)
    assert breakdown.nonlocal_term == pytest.approx(0.0625, abs=1e-9)
    assert breakdown.perturbation > 0.0
    assert breakdown.total == pytest.approx(
        breakdown.kinetic + breakdown.nonlocal_term - breakdown.power - breakdown.perturbation
    )
    assert breakdown.to_dict()["nonlocal"] == breakdown.nonlocal_term


def test_pohozaev_of_gaussian_without_potential(gaussian_1d):
    params = KirchhoffParams(dim=1, p=4.0, q=1.5)
    expected = 0.5 + 0.25 - 0.25 / np.sqrt(2.0 * np.pi)
    assert pohozaev(gaussian_1d, params, ZERO_POTENTIAL) == pytest.approx(expected, abs=1e-8)
    assert pohozaev_scale(gaussian_1d, params, ZERO_POTENTIAL) > expected


def test_j_functional_equals_energy_lambda_at_matching_coefficient(gaussian_1d, gaussian_bump, subcritical_params):
    G = 0.5
    assert j_functional(gaussian_1d, subcritical_params, gaussian_bump, 0.7, G) == pytest.approx(
        energy_lambda(gaussian_1d, subcritical_params, gaussian_bump, 0.7), rel=1e-8
    )


def test_multiplier_minimizes_the_residual(grid_1d, subcritical_params, gaussian_bump):
    rng = np.random.default_rng(1)
    u = project_mass(random_smooth_field(grid_1d, rng, 2.0, (0.5, 1.5)), 1.0)
    lam = multiplier(u, subcritical_params, gaussian_bump)

    best = el_residual(u, subcritical_params, gaussian_bump, lam)
    assert best <= el_residual(u, subcritical_params, gaussian_bump, lam + 1e-3)
    assert best <= el_residual(u, subcritical_params, gaussian_bump, lam - 1e-3)


def test_constrained_gradient_is_tangent_and_a_descent_direction(grid_1d, subcritical_params, gaussian_bump):
    # Setup
    rng = np.random.default_rng(4)
    u = project_mass(random_smooth_field(grid_1d, rng, 2.0, (0.5, 1.5)), 1.0)
    g = constrained_gradient(u, subcritical_params, gaussian_bump)
    eps = 1e-6

    # Test function
    moved = project_mass(u.with_samples(u.samples - eps * g.samples), 1.0)
    slope = (
        energy(moved, subcritical_params, gaussian_bump).total
        - energy(u, subcritical_params, gaussian_bump).total
    ) / eps

    # Verify results
    assert abs(inner(g, u)) <= 1e-12 * l2_norm_array(grid_1d, g.samples)
    assert slope == pytest.approx(-(l2_norm_array(grid_1d, g.samples) ** 2), rel=1e-3)


def test_zero_field_has_no_multiplier(grid_1d, subcritical_params):
    with pytest.raises(ZeroFieldError):
        multiplier(zeros(grid_1d), subcritical_params, ZERO_POTENTIAL)
    with pytest.raises(ZeroFieldError):
        constrained_gradient(zeros(grid_1d), subcritical_params, ZERO_POTENTIAL)
    assert mass(zeros(grid_1d)) == 0.0


def test_j_limit_is_affine_in_the_frozen_coefficient(gaussian_1d, supercritical_params):
    G = 0.5
    lam = 0.3
    at_zero = j_limit(gaussian_1d, supercritical_params, lam, 0.0)
    at_one = j_limit(gaussian_1d, supercritical_params, lam, 1.0)

    assert at_one - at_zero == pytest.approx(0.25 * supercritical_params.b * G, rel=1e-8)
    assert j_limit(gaussian_1d, supercritical_params, lam, G) == pytest.approx(
        energy_limit_lambda(gaussian_1d, supercritical_params, lam), rel=1e-8
    )
    assert energy_limit_lambda(gaussian_1d, supercritical_params, 0.0) == energy_limit(
        gaussian_1d, supercritical_params
    )


def test_energy_of_the_modulus(grid_1d, subcritical_params, gaussian_bump):
    # Setup
    positive = project_mass(from_function(grid_1d, lambda x: np.exp(-0.5 * x**2)), 1.0)
    odd = project_mass(from_function(grid_1d, lambda x: x**3 * np.exp(-0.5 * x**2)), 1.0)

    # Test function
    flipped = energy(positive.with_samples(-positive.samples), subcritical_params, gaussian_bump)
    modulus = energy(odd.with_samples(np.abs(odd.samples)), subcritical_params, gaussian_bump)

    # Verify results
    assert flipped.total == energy(positive, subcritical_params, gaussian_bump).total
    assert modulus.total <= energy(odd, subcritical_params, gaussian_bump).total + 1e-6


def test_sign_of_h_orders_the_energy_against_the_limit(grid_1d, subcritical_params, gaussian_bump, gaussian_well):
    rng = np.random.default_rng(12)
    for _ in range(20):
        u = project_mass(random_smooth_field(grid_1d, rng, 3.0, (0.5, 2.0)), 1.0)
        limit = energy_limit(u, subcritical_params)

        assert energy(u, subcritical_params, gaussian_bump).total <= limit
        assert energy(u, subcritical_params, gaussian_well).total >= limit
        assert energy(u, subcritical_params, ZERO_POTENTIAL).total == limit


def test_multiplier_is_even_and_positive_on_constants(grid_1d, supercritical_params, gaussian_bump):
    rng = np.random.default_rng(5)
    u = project_mass(random_smooth_field(grid_1d, rng, 2.0), 1.0)
    eps = 0.3
    constant = from_function(grid_1d, lambda x: eps + 0.0 * x)

    assert multiplier(u.with_samples(-u.samples), supercritical_params, gaussian_bump) == multiplier(
        u, supercritical_params, gaussian_bump
    )
    assert multiplier(constant, supercritical_params, ZERO_POTENTIAL) == pytest.approx(
        eps ** (supercritical_params.p - 2.0), rel=1e-12
    )
    assert multiplier(constant, supercritical_params, ZERO_POTENTIAL) > 0.0


def test_subcritical_energy_is_bounded_below_on_the_sphere(grid_1d, subcritical_params, gaussian_bump):
    # Setup
    params = subcritical_params
    c_np = get_run_context().gn_constant(1, params.p, grid_1d)
    norm_h = potential_norms(gaussian_bump, params.q, params.p, grid_1d).norm_2_over_2mq
    g = params.gamma_p
    rng = np.random.default_rng(21)

    def lower_bound(G):
        return (
            0.5 * params.a * G
            + 0.25 * params.b * G**2
            - c_np**params.p * G ** (params.p * g / 2.0) * params.c ** (params.p * (1.0 - g) / 2.0) / params.p
            - norm_h * params.c ** (params.q / 2.0) / params.q
        )

    # Test function
    for _ in range(20):
        u = project_mass(random_smooth_field(grid_1d, rng, 2.0, (0.5, 2.0)), params.c)
        for t in (0.5, 1.0, 3.0):
            v = scale_fiber(u, t)
            G = grad_norm_sq(v)

            # Verify results
            assert energy(v, params, gaussian_bump).total >= lower_bound(G) - 1e-8
