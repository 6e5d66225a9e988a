"""
Ground state v_c of the limit problem (h = 0) and its level.

Subcritical: the minimizer u_oo of I_oo on S_c, level l_{oo,c} < 0.
Supercritical: the minimizer of I_oo over the fiber maxima, level m_c > 0.
"""

import logging
from dataclasses import replace

from fields.field import lp_norm_p, project_mass, scale_fiber
from fields.grid import Grid
from functionals.energy import ZERO_POTENTIAL
from functionals.params import KirchhoffParams
from landscape.profile import fiber_argmin
from solvers.refine import refine_critical
from solvers.solution import Solution
from utils.defaults import MAX_ITERATIONS, RESIDUAL_TOL
from utils.run_context import get_run_context

logger = logging.getLogger(__name__)


def _solve(params: KirchhoffParams, grid: Grid, tol: float, max_iterations: int) -> Solution:
    optimizer = get_run_context().gn_optimizer(params.dim, params.p, grid)
    u0 = project_mass(optimizer.profile, params.c)
    supercritical = params.regime == "supercritical"

    if not supercritical:
        t_star, _ = fiber_argmin(u0, params, ZERO_POTENTIAL, warn=False)
        u0 = project_mass(scale_fiber(u0, t_star), params.c)

    solution = refine_critical(
        u0,
        params,
        ZERO_POTENTIAL,
        level_tag="limit_ground_state",
        tol=tol,
        max_iterations=max_iterations,
        fiber=supercritical,
        symmetric=True,
    )

    extras = {"regime": params.regime, "gn_constant": optimizer.constant}
    if supercritical:
        # at a Pohozaev point lambda c = (2p - N(p-2)) / (2p) int |v|^p
        extras["multiplier_identity"] = (
            (2.0 * params.p - params.dim * (params.p - 2.0))
            / (2.0 * params.p)
            * lp_norm_p(solution.field, params.p)
            / params.c
        )
    logger.info(
        "✅ limit ground state (%s): level=%.12g lambda=%.12g converged=%s",
        params.regime,
        solution.level,
        solution.lam,
        solution.converged,
    )
    return replace(solution, extras={**solution.extras, **extras})


def solve_limit_ground_state(
    params: KirchhoffParams,
    grid: Grid,
    *,
    tol: float = RESIDUAL_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> Solution:
    """
    Ground state of the limit problem, cached per (params, grid, tol).

    The start is the Weinstein maximizer scaled along its fiber: to the
    fiber minimum when subcritical, to the fiber maximum (inside the
    descent) when supercritical. Iterates stay even.

    Args:
        params: Kirchhoff constants; the regime decides the construction
        grid: Grid for the field
        tol: Relative residual target
        max_iterations: Cap on descent steps

    Returns:
        Solution tagged limit_ground_state; level is l_{oo,c} or m_c
    """
    if grid.dim != params.dim:
        raise ValueError(f"grid dimension {grid.dim} does not match params.dim={params.dim}")
    return get_run_context().get_or_compute(
        "limit_ground_state",
        (params, grid, float(tol), int(max_iterations)),
        lambda: _solve(params, grid, tol, max_iterations),
    )
