"""
Refinement of an approximate critical point into a converged Solution.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np
from scipy import optimize
from scipy.sparse.linalg import LinearOperator

from fields.field import (
    Field,
    apply_symbol,
    boundary_fraction,
    grad_norm_sq,
    laplacian_array,
    project_mass,
)
from functionals.energy import multiplier, nonlinearity
from functionals.params import KirchhoffParams
from potentials.families import PotentialSpec
from solvers.descent import ProjectedDescent
from solvers.solution import LevelTag, Solution, build_solution, residual_target
from utils.defaults import DECAY_TOL, MAX_ITERATIONS, NEWTON_ITERATIONS, RESIDUAL_TOL
from utils.errors import ZeroFieldError

logger = logging.getLogger(__name__)


def _newton_polish(
    u: Field, params: KirchhoffParams, spec: PotentialSpec, tol: float
) -> Optional[Field]:
    """
    Newton-Krylov on the Euler-Lagrange system with the mass constraint.

    Unknowns are (u, lambda); equations are the residual of the equation and
    mass(u) - c. The Kirchhoff stiffness (a + b G) |k|^2 + lambda is inverted
    in Fourier space as the inner preconditioner.
    """
    grid = u.grid
    shape = grid.shape
    size = grid.size
    volume = grid.cell_volume
    lam0 = multiplier(u, params, spec)

    def unpack(x: np.ndarray):
        return x[:size].reshape(shape), x[size]

    def system(x: np.ndarray) -> np.ndarray:
        samples, lam = unpack(x)
        trial = u.with_samples(samples)
        G = grad_norm_sq(trial)
        residual = (
            -(params.a + params.b * G) * laplacian_array(grid, samples)
            + lam * samples
            - nonlinearity(trial, params, spec)
        )
        constraint = float(np.sum(samples**2) * volume) - params.c
        return np.concatenate([residual.ravel(), [constraint]])

    stiffness = params.a + params.b * grad_norm_sq(u)
    symbol = 1.0 / (max(lam0, stiffness * (np.pi / grid.half_width) ** 2) + stiffness * grid.k_squared)

    def precondition(x: np.ndarray) -> np.ndarray:
        samples, lam = unpack(np.asarray(x).ravel())
        return np.concatenate([apply_symbol(grid, samples, symbol).ravel(), [lam]])

    inner_m = LinearOperator((size + 1, size + 1), matvec=precondition, dtype=float)
    f_tol = 0.1 * residual_target(u, params, tol) / np.sqrt((2.0 * grid.half_width) ** grid.dim)
    x0 = np.concatenate([u.samples.ravel(), [lam0]])
    try:
        x = optimize.newton_krylov(
            system, x0, inner_M=inner_m, f_tol=f_tol, maxiter=NEWTON_ITERATIONS
        )
    except optimize.NoConvergence as exc:
        x = exc.args[0]
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        logger.debug("newton polish abandoned: %s", exc)
        return None

    samples, _ = unpack(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(samples)) or not np.any(samples):
        return None
    return project_mass(u.with_samples(samples), params.c)


def refine_critical(
    u0: Field,
    params: KirchhoffParams,
    spec: PotentialSpec,
    *,
    level_tag: LevelTag = "mountain_pass",
    tol: float = RESIDUAL_TOL,
    max_iterations: int = MAX_ITERATIONS,
    fiber: Optional[bool] = None,
    symmetric: Optional[bool] = None,
    extras: Optional[Dict[str, Any]] = None,
) -> Solution:
    """
    Drive u0 to a critical point of I on S_c.

    Projected descent (on the fiber maxima when supercritical) brings the
    residual down; a Newton-Krylov polish on (u, lambda) follows for smooth
    problems and is kept only if it lowers the residual without moving the
    level. An unconverged run is returned with its failure, never raised.

    Args:
        u0: Approximate critical point, projected onto S_c first
        params: Kirchhoff constants
        spec: Perturbation h
        level_tag: Tag recorded on the Solution
        tol: Relative residual target
        max_iterations: Cap on descent steps
        fiber: Descend on fiber maxima; defaults to the supercritical regime
        symmetric: Stay among even functions; defaults to "spec and u0 even"
        extras: Extra diagnostics copied onto the Solution

    Returns:
        Solution, converged or carrying its failure

    Raises:
        ZeroFieldError: If u0 is the zero field
    """
    if u0.is_zero():
        raise ZeroFieldError("zero-field: refine_critical needs a nonzero start")
    u = project_mass(u0, params.c)
    if fiber is None:
        fiber = params.regime == "supercritical"

    if boundary_fraction(u) > DECAY_TOL:
        logger.warning("⚠️ start does not decay inside the box; reporting escape")
        return build_solution(
            u,
            params,
            spec,
            level_tag,
            0,
            tol=tol,
            failure="escape: the start does not decay inside the box",
            extras=extras,
        )

    start = build_solution(u, params, spec, level_tag, 0, tol=tol, extras=extras)
    if start.converged:
        return start

    descent = ProjectedDescent(
        u,
        params,
        spec,
        fiber=fiber,
        symmetric=symmetric,
        tol=tol,
        max_iterations=max_iterations,
    )
    result = descent.run()
    u = result.field
    if not result.converged and not descent.absorbing:
        polished = _newton_polish(u, params, spec, tol)
        if polished is not None:
            before = build_solution(u, params, spec, level_tag, result.iterations, tol=tol)
            after = build_solution(polished, params, spec, level_tag, result.iterations, tol=tol)
            level_shift = abs(after.level - before.level) / max(abs(before.level), 1e-300)
            if after.el_residual < before.el_residual and level_shift < 1e-3:
                logger.debug(
                    "newton polish: residual %.3e -> %.3e", before.el_residual, after.el_residual
                )
                u = polished

    solution = build_solution(
        u, params, spec, level_tag, result.iterations, tol=tol, extras=extras
    )
    if solution.converged or solution.failure is not None:
        return solution
    if result.reason == "line-search":
        failure = "stalled: the line search found no decrease"
    else:
        failure = f"max-iterations: residual {solution.el_residual:.3e} after {result.iterations} steps"
    logger.warning("⚠️ %s not converged: %s (level %.12g)", level_tag, failure, solution.level)
    return build_solution(
        u, params, spec, level_tag, result.iterations, tol=tol, failure=failure, extras=extras
    )
