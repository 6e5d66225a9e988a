"""Gagliardo-Nirenberg constant, thresholds, the phi landscape and fiber maps."""

import numpy as np
import pytest
from scipy import optimize

from fields.field import (
    from_function,
    grad_norm_sq,
    l2_norm_array,
    laplacian,
    project_mass,
    random_smooth_field,
    scale_fiber,
)
from functionals.energy import energy, pohozaev
from functionals.params import KirchhoffParams
from landscape.gn import gamma, gn_optimizer, weinstein_quotient
from landscape.profile import (
    energy_lower_bound,
    fiber_argmax,
    fiber_argmin,
    fiber_energies,
    fiber_energy,
    fiber_pohozaev,
    fiber_scan,
    phi_profile,
    phi_scan,
    psi,
)
from landscape.thresholds import landscape_coefficients, landscape_threshold, psi_t_bar, t_bar
from potentials.families import PotentialSpec
from utils.errors import NoPositiveRegionError, RegimeError
from utils.run_context import get_run_context


def test_gamma_exponent():
    assert gamma(4.0, 1) == 0.25
    assert gamma(3.0, 3) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        gamma(2.0, 1)


def test_gn_constant_matches_sech_soliton(grid_1d):
    # sqrt(2) sech x solves -w'' + w = w^3 and its quotient is 3^{-1/8}
    optimizer = gn_optimizer(1, 4.0, grid_1d)
    soliton = from_function(grid_1d, lambda x: np.sqrt(2.0) / np.cosh(x))

    assert optimizer.constant == pytest.approx(3.0 ** (-1.0 / 8.0), rel=1e-3)
    assert weinstein_quotient(soliton, 4.0) == pytest.approx(3.0 ** (-1.0 / 8.0), rel=1e-6)


def test_random_fields_respect_gn_bound(grid_1d):
    constant = get_run_context().gn_constant(1, 4.0, grid_1d)
    rng = np.random.default_rng(11)
    for _ in range(200):
        u = random_smooth_field(grid_1d, rng, 3.0, (0.3, 2.0))
        assert weinstein_quotient(u, 4.0) <= constant * (1.0 + 1e-8)


def test_gn_constant_is_cached(grid_1d):
    first = get_run_context().gn_optimizer(1, 4.0, grid_1d)
    assert get_run_context().is_cached("gn_optimizer", (1, 4.0, grid_1d))
    assert get_run_context().gn_optimizer(1, 4.0, grid_1d) is first


def test_psi_peaks_at_t_bar(supercritical_params):
    c_np = 0.8
    tb = t_bar(supercritical_params, c_np)
    k1, _ = landscape_coefficients(supercritical_params, c_np, 0.0)
    g = supercritical_params.gamma_p
    qg = supercritical_params.q * g

    def psi(t):
        return 0.5 * t ** (2.0 - qg) - k1 * t ** (supercritical_params.p * g - qg)

    assert psi(tb) == pytest.approx(psi_t_bar(supercritical_params, c_np), rel=1e-12)
    assert psi(tb) > psi(0.99 * tb)
    assert psi(tb) > psi(1.01 * tb)


def test_landscape_threshold_makes_k2_touch_psi_max(supercritical_params):
    c_np = 0.8
    threshold = landscape_threshold(supercritical_params, c_np)
    _, k2 = landscape_coefficients(supercritical_params, c_np, threshold)
    assert k2 == pytest.approx(psi_t_bar(supercritical_params, c_np), rel=1e-12)


def test_phi_profile_ordering(supercritical_params, supercritical_grid, landscape_bump):
    # Test function
    profile = phi_profile(supercritical_params, landscape_bump, supercritical_grid)

    # Verify results
    assert 0.0 < profile.t1 < profile.r1 < profile.t2 < profile.r2
    for r in (profile.r1, profile.r2):
        assert abs(float(profile.phi(r))) <= 1e-8 * max(1.0, 0.5 * r**2)
    assert float(profile.phi(profile.t1)) < 0.0
    assert float(profile.phi(profile.t2)) > 0.0
    assert profile.k2 < profile.psi_t_bar
    assert profile.thresholds["landscape_gap"] > profile.norm_pq


def test_phi_profile_without_potential(supercritical_params, supercritical_grid):
    profile = phi_profile(supercritical_params, PotentialSpec(), supercritical_grid)
    assert profile.r1 == 0.0 and profile.t1 == 0.0
    assert profile.t2 < profile.r2
    assert abs(float(profile.phi(profile.r2))) <= 1e-8 * max(1.0, 0.5 * profile.r2**2)

    rows = phi_scan(profile, [0.5 * profile.r2, profile.r2])
    assert rows[0][1] > 0.0
    assert len(rows[0]) == 3


def test_phi_profile_errors(supercritical_params, supercritical_grid, subcritical_params, landscape_bump):
    with pytest.raises(NoPositiveRegionError):
        phi_profile(
            supercritical_params,
            landscape_bump.with_amplitude(20.0 * landscape_bump.h0),
            supercritical_grid,
        )
    with pytest.raises(RegimeError):
        phi_profile(subcritical_params, landscape_bump, supercritical_grid, c_np=1.0)


def test_fiber_energies_match_materialized_dilation(gaussian_1d, subcritical_params, gaussian_bump):
    ts = [0.8, 1.25]
    expected = [energy(scale_fiber(gaussian_1d, t), subcritical_params, gaussian_bump).total for t in ts]
    np.testing.assert_allclose(
        fiber_energies(gaussian_1d, ts, subcritical_params, gaussian_bump), expected, rtol=1e-9
    )
    assert fiber_scan(gaussian_1d, ts, subcritical_params, gaussian_bump)[1][0] == 1.25
    with pytest.raises(ValueError):
        fiber_energies(gaussian_1d, [0.0], subcritical_params, gaussian_bump)


@pytest.mark.parametrize("sign", ["nonneg", "nonpos"])
def test_pohozaev_is_the_fiber_derivative(grid_1d, sign):
    # Setup
    params = KirchhoffParams(dim=1, p=12.0, q=1.5)
    spec = PotentialSpec(family="rational_decay", sign=sign, h0=0.3, decay_s=1.0)
    rng = np.random.default_rng(5)
    step = 1e-4

    for _ in range(20):
        u = project_mass(random_smooth_field(grid_1d, rng, 2.0, (0.5, 1.5)), params.c)

        # Test function
        lo, hi = fiber_energies(u, [1.0 - step, 1.0 + step], params, spec)
        derivative = (hi - lo) / (2.0 * step)

        # Verify results
        assert pohozaev(u, params, spec) == pytest.approx(derivative, rel=2e-3)
        assert fiber_pohozaev(u, [1.0], params, spec)[0] == pytest.approx(
            pohozaev(u, params, spec), rel=1e-10
        )


def test_fiber_argmax_is_a_pohozaev_zero(supercritical_grid, supercritical_params, landscape_bump):
    u = project_mass(from_function(supercritical_grid, lambda x: np.exp(-(x**2) / 0.18)), 1.0)
    t_star, level = fiber_argmax(u, supercritical_params, landscape_bump)

    G = grad_norm_sq(u)
    scale = supercritical_params.a * t_star**2 * G + supercritical_params.b * t_star**4 * G**2
    assert abs(fiber_pohozaev(u, [t_star], supercritical_params, landscape_bump)[0]) <= 1e-8 * scale
    assert level >= fiber_energies(u, [0.9 * t_star, 1.1 * t_star], supercritical_params, landscape_bump).max()


def test_fiber_argmin_in_the_subcritical_regime(gaussian_1d, subcritical_params, gaussian_bump):
    t_star, level = fiber_argmin(gaussian_1d, subcritical_params, gaussian_bump)
    assert level < 0.0
    assert level <= fiber_energies(gaussian_1d, [0.9 * t_star, 1.1 * t_star], subcritical_params, gaussian_bump).min()


def test_energy_is_bounded_below_by_phi(supercritical_params, supercritical_grid, landscape_bump):
    profile = phi_profile(supercritical_params, landscape_bump, supercritical_grid)
    rng = np.random.default_rng(2)
    for _ in range(20):
        u = project_mass(random_smooth_field(supercritical_grid, rng, 0.3, (0.15, 0.4)), 1.0)
        assert energy_lower_bound(u, profile) <= energy(u, supercritical_params, landscape_bump).total + 1e-10


def test_gn_maximizer_solves_its_euler_lagrange_equation(grid_1d):
    optimizer = gn_optimizer(1, 6.0, grid_1d)
    w = optimizer.profile
    source = np.abs(w.samples) ** 4 * w.samples

    residual = -laplacian(w).samples + optimizer.omega * w.samples - source

    assert l2_norm_array(grid_1d, residual) <= 1e-6 * l2_norm_array(grid_1d, source)


def test_psi_t_bar_against_direct_maximization(supercritical_params):
    # Setup
    c_np = 0.8
    k1, _ = landscape_coefficients(supercritical_params, c_np, 0.0)
    tb = t_bar(supercritical_params, c_np)
    ts = np.geomspace(1e-3 * tb, 1e3 * tb, 1000)

    # Test function
    values = psi(ts, supercritical_params, k1)
    k = int(np.argmax(values))
    polished = optimize.minimize_scalar(
        lambda t: -float(psi(t, supercritical_params, k1)),
        bounds=(ts[k - 1], ts[k + 1]),
        method="bounded",
        options={"xatol": 1e-14 * tb},
    )

    # Verify results
    assert np.all(values <= psi_t_bar(supercritical_params, c_np) * (1.0 + 1e-12))
    assert -polished.fun == pytest.approx(psi_t_bar(supercritical_params, c_np), rel=1e-8)


def test_fiber_energy_vanishes_as_t_shrinks(supercritical_grid, supercritical_params, landscape_bump):
    u = project_mass(from_function(supercritical_grid, lambda x: np.exp(-(x**2) / 0.18)), 1.0)
    ts = (1e-1, 1e-2, 1e-3)

    limit_values = [abs(fiber_energy(u, t, supercritical_params, PotentialSpec())) for t in ts]
    perturbed = fiber_energy(u, 1e-3, supercritical_params, landscape_bump)

    assert limit_values[0] > limit_values[1] > limit_values[2]
    assert limit_values[2] < 1e-4
    assert abs(perturbed) < 1e-3


def test_fiber_energy_falls_without_bound_in_the_supercritical_regime(
    supercritical_grid, supercritical_params, landscape_bump
):
    u = project_mass(from_function(supercritical_grid, lambda x: np.exp(-(x**2) / 0.18)), 1.0)
    t_star, _ = fiber_argmax(u, supercritical_params, landscape_bump)

    values = fiber_energies(u, [4.0 * t_star, 8.0 * t_star, 16.0 * t_star], supercritical_params, landscape_bump)

    assert values[0] < 0.0
    assert values[0] > values[1] > values[2]
