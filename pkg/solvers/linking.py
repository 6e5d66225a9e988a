"""
Linking surface and level bracket for the supercritical problem with h <= 0.

The surface over Q = B_R x [s1, s2] is

    Phi(y, s) = (e^s * v_c)(. - y),   (e^s * v)(x) = e^{Ns/2} v(e^s x)

and its energy splits into the closed-form limit part and the absorbing part

    I(Phi(y, s)) = I_oo(e^s * v_c)
                   + (1/q) e^{s(qN/2 - N)} int hbar(y + e^{-s} z) |v_c(z)|^q dz

which is evaluated on the support of v_c, so the lattice may reach beyond
the box.
"""

import logging
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from fields.field import Field, grad_norm_sq, lp_norm_p, scale_fiber, support_radius, translate
from fields.grid import Grid
from functionals.energy import energy_limit
from functionals.params import KirchhoffParams
from landscape.thresholds import linking_multiplier_bound, linking_upper_bound
from potentials.assumptions import check_assumptions
from potentials.families import PotentialSpec, potential_values
from solvers.limit import solve_limit_ground_state
from solvers.refine import refine_critical
from solvers.solution import LevelBracket, Solution
from utils.defaults import (
    BOUNDARY_REFINEMENT,
    LATTICE_ANGLES,
    LATTICE_RADII,
    LATTICE_S_VALUES,
    LINKING_EPSILON,
    MAX_ITERATIONS,
    RESIDUAL_TOL,
)
from utils.errors import PotentialError, RegimeError

logger = logging.getLogger(__name__)

# Samples of v_c below this fraction of its peak are left out of the surface integral
SUPPORT_CUTOFF = 1e-12


def unit_directions(dim: int, count: int) -> np.ndarray:
    """Directions on the unit sphere: +-1 in N=1, equal angles in N=2, a Fibonacci sphere in N=3."""
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if dim == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    k = np.arange(count) + 0.5
    polar = np.arccos(1.0 - 2.0 * k / count)
    azimuth = np.pi * (1.0 + np.sqrt(5.0)) * k
    return np.stack(
        [np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)],
        axis=-1,
    )


def _s_values(s1: float, s2: float, count: int) -> np.ndarray:
    return np.unique(np.append(np.linspace(s1, s2, count), 0.0))


class SurfaceEnergy:
    """I(Phi(y, s)) for a fixed profile v."""

    def __init__(self, v: Field, params: KirchhoffParams, spec: PotentialSpec):
        self.params = params
        self.spec = spec
        self.dim = v.grid.dim
        self.G = grad_norm_sq(v)
        self.power = lp_norm_p(v, params.p)
        if not spec.vanishes:
            mask = np.abs(v.samples) > SUPPORT_CUTOFF * np.max(np.abs(v.samples))
            self.weight = np.abs(v.samples[mask]) ** params.q * v.grid.cell_volume
            self.points = [np.broadcast_to(x, v.grid.shape)[mask] for x in v.grid.coordinates]

    def limit_part(self, s: float) -> float:
        pr = self.params
        t = np.exp(s)
        return (
            0.5 * pr.a * t**2 * self.G
            + 0.25 * pr.b * t**4 * self.G**2
            - t ** (pr.p * pr.gamma_p) * self.power / pr.p
        )

    def perturbation_part(self, y: Sequence[float], s: float) -> float:
        """-(1/q) int h |Phi(y, s)|^q, nonnegative for h <= 0."""
        if self.spec.vanishes:
            return 0.0
        pr = self.params
        scale = np.exp(-s)
        coords = [y_i + scale * z for y_i, z in zip(y, self.points)]
        integral = float(np.sum(potential_values(self.spec, coords) * self.weight))
        jacobian = np.exp(s * (pr.q * self.dim / 2.0 - self.dim))
        return -jacobian * integral / pr.q

    def __call__(self, y: Sequence[float], s: float) -> float:
        return self.limit_part(s) + self.perturbation_part(y, s)


def _lattice(
    surface: SurfaceEnergy,
    radii: np.ndarray,
    directions: np.ndarray,
    s_values: np.ndarray,
) -> List[Tuple[Tuple[float, ...], float, float, float]]:
    """Rows (y, s, energy, perturbation) over radii x directions x s_values."""
    rows = []
    for r in radii:
        ys = [tuple(np.zeros(surface.dim))] if r == 0 else [tuple(r * d) for d in directions]
        for y in ys:
            for s in s_values:
                perturbation = surface.perturbation_part(y, s)
                rows.append((y, float(s), surface.limit_part(s) + perturbation, perturbation))
    return rows


def linking_level(
    params: KirchhoffParams,
    spec: PotentialSpec,
    grid: Grid,
    R: float,
    s1: float,
    s2: float,
    grid_Q: Tuple[int, int, int] = (LATTICE_RADII, LATTICE_ANGLES, LATTICE_S_VALUES),
    epsilon: Optional[float] = None,
    v_c: Optional[Field] = None,
    *,
    tol: float = RESIDUAL_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> LevelBracket:
    """
    Evaluate the linking surface on a lattice of Q and certify the bracket.

    Args:
        params: Supercritical Kirchhoff constants
        spec: Perturbation with h <= 0
        grid: Grid of the limit ground state
        R: Radius of the ball of centers
        s1: Lower log-scale, s1 < 0
        s2: Upper log-scale, s2 > 0
        grid_Q: Radii, directions (N >= 2) and s-values of the lattice
        epsilon: Boundary slack above m_c (LINKING_EPSILON * m_c by default)
        v_c: Limit ground state (solved on the grid when omitted)

    Returns:
        LevelBracket; certified means boundary_max < m_c + epsilon,
        boundary_max < interior_max, m_c < interior_max < 2 m_c and h not
        identically zero; every failed check is recorded in violations

    Raises:
        RegimeError: If p <= 2 + 8/N
        PotentialError: If h is not nonpositive
        AssumptionError: If |x . grad hbar| / hbar is unbounded
    """
    if params.regime != "supercritical":
        raise RegimeError(
            f"the linking surface needs p > {params.p_bar:.6g}, got p={params.p}",
            {"field": "params.p"},
        )
    if spec.sign != "nonpos" and not spec.vanishes:
        raise PotentialError("the linking surface needs h <= 0", {"field": "potential.sign"})
    if not (R > 0 and s1 < 0 < s2):
        raise ValueError(f"need R > 0 and s1 < 0 < s2, got R={R}, s1={s1}, s2={s2}")

    if v_c is None:
        v_c = solve_limit_ground_state(params, grid, tol=tol, max_iterations=max_iterations).field
    m_c = energy_limit(v_c, params)

    report = check_assumptions(spec, params, m_c, grid=grid)
    report.require("radial_ratio_bounded")
    if not report["linking_bound"].passed:
        logger.warning(
            "⚠️ ||hbar||_{2/(2-q)} = %.6g is above the linking threshold %.6g",
            report["linking_bound"].attained,
            report["linking_bound"].threshold,
        )
    reach = R + support_radius(v_c) * np.exp(-s1)
    if reach > grid.half_width:
        logger.warning(
            "⚠️ surface reaches |x| = %.4g beyond the box half width %.4g; "
            "surface_field will clip, lattice energies do not",
            reach,
            grid.half_width,
        )

    n_r, n_dir, n_s = grid_Q
    surface = SurfaceEnergy(v_c, params, spec)
    directions = unit_directions(params.dim, n_dir)
    lattice = _lattice(surface, np.linspace(0.0, R, n_r), directions, _s_values(s1, s2, n_s))

    fine = BOUNDARY_REFINEMENT
    fine_directions = unit_directions(params.dim, fine * n_dir)
    lateral = _lattice(
        surface, np.array([R]), fine_directions, _s_values(s1, s2, fine * (n_s - 1) + 1)
    )
    faces = _lattice(
        surface, np.linspace(0.0, R, fine * (n_r - 1) + 1), fine_directions, np.array([s1, s2])
    )

    y_best, s_best, interior_max, _ = max(lattice, key=lambda row: row[2])
    s_grid = _s_values(s1, s2, n_s)
    i = int(np.searchsorted(s_grid, s_best))
    if 0 < i < len(s_grid) - 1:
        result = optimize.minimize_scalar(
            lambda s: -surface(y_best, s),
            bracket=(s_grid[i - 1], s_grid[i], s_grid[i + 1]),
            method="golden",
        )
        if s1 <= result.x <= s2 and -result.fun > interior_max:
            s_best, interior_max = float(result.x), float(-result.fun)

    y_edge, s_edge, boundary_max, _ = max(lateral + faces, key=lambda row: row[2])
    perturbation_max = max(row[3] for row in lateral)

    eps = LINKING_EPSILON * m_c if epsilon is None else epsilon
    norm_hbar = report.norms["norm_2_over_2mq"]
    violations: List[Dict[str, Any]] = []
    if not boundary_max < m_c + eps:
        violations.append(
            {"check": "boundary_below_m_c_plus_epsilon", "y": list(y_edge), "s": s_edge,
             "energy": boundary_max, "bound": m_c + eps}
        )
    if not boundary_max < interior_max:
        violations.append(
            {"check": "boundary_below_interior", "y": list(y_edge), "s": s_edge,
             "energy": boundary_max, "bound": interior_max}
        )
    if not m_c < interior_max < 2.0 * m_c:
        violations.append(
            {"check": "interior_between_m_c_and_2m_c", "y": list(y_best), "s": s_best,
             "energy": interior_max, "bound": 2.0 * m_c}
        )
    if spec.vanishes:
        # the surface energy does not depend on y, so no face separates the levels
        violations.append(
            {"check": "potential_vanishes", "y": list(y_best), "s": s_best,
             "energy": interior_max, "bound": m_c}
        )
    for violation in violations:
        logger.warning("⚠️ linking certificate: %s", violation)

    bracket = LevelBracket(
        m_c=m_c,
        interior_max=interior_max,
        boundary_max=boundary_max,
        upper_bound_L=linking_upper_bound(params, m_c, norm_hbar),
        certified=not violations,
        epsilon=eps,
        argmax=(tuple(float(x) for x in y_best), float(s_best)),
        boundary_argmax=(tuple(float(x) for x in y_edge), float(s_edge)),
        boundary_perturbation_max=float(perturbation_max),
        violations=violations,
        lattice=[(*y, s, e) for y, s, e, _ in lattice],
    )
    logger.info(
        "linking bracket: m_c=%.12g interior_max=%.12g boundary_max=%.12g certified=%s",
        m_c,
        interior_max,
        boundary_max,
        bracket.certified,
    )
    return bracket


def surface_field(v: Field, y: Sequence[float], s: float) -> Field:
    """Phi(y, s) = (e^s * v)(. - y) on the grid of v."""
    return translate(scale_fiber(v, float(np.exp(s))), y)


def refine_linking_candidate(
    params: KirchhoffParams,
    spec: PotentialSpec,
    grid: Grid,
    bracket: LevelBracket,
    v_c: Optional[Field] = None,
    *,
    tol: float = RESIDUAL_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> Solution:
    """
    Refine the surface point of maximal energy into a linking_candidate.

    Returns:
        Solution with extras bracket, multiplier_bound and
        multiplier_bound_holds (lambda >= bound within tol * |bound|)
    """
    if v_c is None:
        v_c = solve_limit_ground_state(params, grid, tol=tol, max_iterations=max_iterations).field
    y, s = bracket.argmax
    start = surface_field(v_c, y, s)
    solution = refine_critical(
        start,
        params,
        spec,
        level_tag="linking_candidate",
        tol=tol,
        max_iterations=max_iterations,
        fiber=True,
    )

    report = check_assumptions(spec, params, bracket.m_c, grid=grid)
    upsilon = report.norms["upsilon"]
    extras: Dict[str, Any] = {"bracket": bracket.to_dict()}
    if upsilon is not None:
        bound = linking_multiplier_bound(
            params, bracket.m_c, report.norms["norm_2_over_2mq"], upsilon
        )
        extras["multiplier_bound"] = bound
        extras["multiplier_bound_holds"] = solution.lam >= bound - tol * abs(bound)
    logger.info(
        "✅ linking candidate: level=%.12g lambda=%.12g converged=%s",
        solution.level,
        solution.lam,
        solution.converged,
    )
    return replace(solution, extras={**solution.extras, **extras})
