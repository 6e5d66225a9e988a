"""End-to-end solver runs in the three regimes; marked slow."""

import numpy as np
import pytest

from fields.field import from_function, is_even
from fields.grid import make_grid
from functionals.energy import el_residual
from potentials.families import PotentialSpec
from potentials.norms import potential_norms
from solvers.limit import solve_limit_ground_state
from solvers.linking import linking_level, refine_linking_candidate
from solvers.minimize import check_superadditivity, level_sweep, minimize_global
from solvers.mountain_pass import mountain_pass
from solvers.refine import refine_critical
from utils.defaults import POHOZAEV_TOL
from utils.run_context import get_run_context

pytestmark = pytest.mark.slow


def test_subcritical_limit_ground_state(subcritical_params, subcritical_grid):
    solution = solve_limit_ground_state(subcritical_params, subcritical_grid)

    assert solution.converged
    assert solution.level < 0.0
    assert solution.lam > 0.0
    assert is_even(solution.field)
    assert solution.min_sample_ratio >= -1e-6
    assert get_run_context().is_cached(
        "limit_ground_state", (subcritical_params, subcritical_grid, 1e-6, 5000)
    )


def test_supercritical_limit_ground_state(supercritical_params, supercritical_grid):
    solution = solve_limit_ground_state(supercritical_params, supercritical_grid)

    assert solution.converged
    assert solution.level > 0.0
    assert solution.pohozaev_residual <= POHOZAEV_TOL
    assert solution.lam == pytest.approx(solution.extras["multiplier_identity"], rel=1e-4)


def test_limit_level_is_stable_under_refinement(subcritical_params):
    coarse = solve_limit_ground_state(subcritical_params, make_grid(1, 40.0, 512))
    fine = solve_limit_ground_state(subcritical_params, make_grid(1, 40.0, 1024))
    assert fine.level == pytest.approx(coarse.level, abs=1e-6 * abs(coarse.level))


def test_global_minimum_lies_below_the_limit_level(subcritical_params, subcritical_grid, gaussian_bump):
    # Test function
    solution = minimize_global(subcritical_params, gaussian_bump, subcritical_grid, starts=4)

    # Verify results
    limit_level = solution.extras["limit_level"]
    assert solution.converged
    assert limit_level < 0.0
    assert solution.level < limit_level - 1e-4
    assert solution.min_sample_ratio >= -1e-6
    assert solution.lam > 0.0


def test_subadditivity_of_the_minimum(subcritical_params, subcritical_grid, gaussian_bump):
    result = check_superadditivity(subcritical_params, gaussian_bump, subcritical_grid, 0.5, 0.5, starts=2)
    assert result["holds"]
    assert result["margin"] >= 0.0


def test_mountain_pass_below_m_c(supercritical_params, supercritical_grid, landscape_bump):
    # Test function
    solution = mountain_pass(supercritical_params, landscape_bump, supercritical_grid)

    # Verify results
    assert solution.converged
    assert solution.level_tag == "mountain_pass"
    assert solution.pohozaev_residual <= POHOZAEV_TOL
    assert solution.lam > 0.0
    assert solution.extras["multiplier_bound_holds"]
    assert solution.level < solution.extras["m_c"] - 1e-5


def test_mountain_pass_without_potential_is_the_limit_level(supercritical_params, supercritical_grid):
    solution = mountain_pass(supercritical_params, PotentialSpec(), supercritical_grid)
    assert solution.converged
    assert solution.level == pytest.approx(solution.extras["m_c"], rel=1e-4)


def test_linking_bracket_and_bound_state(supercritical_params, supercritical_grid):
    # Setup
    limit = solve_limit_ground_state(supercritical_params, supercritical_grid)
    m_c = limit.level
    unit = PotentialSpec(family="rational_decay", sign="nonpos", h0=1.0, decay_s=1.0)
    norm = potential_norms(unit, 1.5, 12.0, supercritical_grid).norm_2_over_2mq
    spec = unit.with_amplitude(0.5 * 1.5 * m_c / norm)

    # Test function
    bracket = linking_level(
        supercritical_params, spec, supercritical_grid, 2.0, -2.0, 2.0, v_c=limit.field
    )
    candidate = refine_linking_candidate(
        supercritical_params, spec, supercritical_grid, bracket, limit.field
    )

    # Verify results
    assert bracket.boundary_max < bracket.interior_max
    assert m_c < bracket.interior_max < 2.0 * m_c
    assert bracket.upper_bound_L < 2.0 * m_c
    assert candidate.converged
    assert candidate.lam > 0.0
    assert candidate.extras["multiplier_bound_holds"]


def test_limit_level_sweep_is_strictly_subadditive(subcritical_params, subcritical_grid):
    rows = dict(level_sweep(subcritical_params, subcritical_grid, [0.5, 1.0]))
    assert rows[1.0] < 2.0 * rows[0.5] < 0.0


def test_linking_without_potential_peaks_at_m_c(supercritical_params, supercritical_grid):
    limit = solve_limit_ground_state(supercritical_params, supercritical_grid)
    bracket = linking_level(
        supercritical_params, PotentialSpec(), supercritical_grid, 2.0, -2.0, 2.0, v_c=limit.field
    )

    assert bracket.interior_max == pytest.approx(limit.level, rel=1e-6)
    assert bracket.boundary_max <= bracket.interior_max
    assert not bracket.certified


def test_refine_returns_a_converged_start_unchanged(subcritical_params, subcritical_grid):
    limit = solve_limit_ground_state(subcritical_params, subcritical_grid)

    again = refine_critical(
        limit.field, subcritical_params, PotentialSpec(), level_tag="limit_ground_state", fiber=False
    )

    assert again.converged
    assert again.iterations == 0
    assert again.level == pytest.approx(limit.level, rel=1e-12)


def test_refine_recovers_the_ground_state_from_a_perturbed_start(subcritical_params, subcritical_grid):
    # Setup
    limit = solve_limit_ground_state(subcritical_params, subcritical_grid)
    peak = float(np.max(limit.field.samples))
    bump = from_function(subcritical_grid, lambda x: np.exp(-(x**2) / 4.0) * np.cos(x))
    start = limit.field.with_samples(limit.field.samples + 1e-2 * peak * bump.samples)

    # Test function
    solution = refine_critical(
        start, subcritical_params, PotentialSpec(), level_tag="limit_ground_state", fiber=False
    )

    # Verify results
    assert solution.converged
    assert solution.iterations > 0
    assert solution.level == pytest.approx(limit.level, rel=1e-6)


def test_noise_raises_the_euler_lagrange_residual(subcritical_params, subcritical_grid):
    limit = solve_limit_ground_state(subcritical_params, subcritical_grid)
    rng = np.random.default_rng(11)
    peak = float(np.max(limit.field.samples))
    noisy = limit.field.with_samples(
        limit.field.samples + 1e-3 * peak * rng.standard_normal(subcritical_grid.shape)
    )

    before = el_residual(limit.field, subcritical_params, PotentialSpec(), limit.lam)
    after = el_residual(noisy, subcritical_params, PotentialSpec(), limit.lam)

    assert after >= before + 1e-4


def test_mountain_pass_level_is_stable_under_refinement(supercritical_params, landscape_bump):
    coarse = mountain_pass(supercritical_params, landscape_bump, make_grid(1, 3.0, 2048))
    fine = mountain_pass(supercritical_params, landscape_bump, make_grid(1, 3.0, 4096))

    assert coarse.converged and fine.converged
    assert fine.level == pytest.approx(coarse.level, rel=1e-5)


def test_linking_levels_are_stable_under_refinement(supercritical_params, supercritical_grid):
    # Setup
    m_c = solve_limit_ground_state(supercritical_params, supercritical_grid).level
    unit = PotentialSpec(family="rational_decay", sign="nonpos", h0=1.0, decay_s=1.0)
    norm = potential_norms(unit, 1.5, 12.0, supercritical_grid).norm_2_over_2mq
    spec = unit.with_amplitude(0.5 * 1.5 * m_c / norm)

    # Test function
    levels = []
    for points in (2048, 4096):
        grid = make_grid(1, 3.0, points)
        limit = solve_limit_ground_state(supercritical_params, grid)
        bracket = linking_level(supercritical_params, spec, grid, 2.0, -2.0, 2.0, v_c=limit.field)
        candidate = refine_linking_candidate(supercritical_params, spec, grid, bracket, limit.field)
        assert candidate.converged
        levels.append((bracket.interior_max, candidate.level))

    # Verify results
    (coarse_max, coarse_level), (fine_max, fine_level) = levels
    assert fine_max == pytest.approx(coarse_max, rel=1e-5)
    assert fine_level == pytest.approx(coarse_level, rel=1e-5)
