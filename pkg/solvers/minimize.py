"""
Global minimization of I on S_c in the subcritical regime with h >= 0.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from fields.field import Field, l2_norm_array, project_mass, random_smooth_field, translate
from fields.grid import Grid
from functionals.energy import energy
from functionals.params import KirchhoffParams
from potentials.assumptions import check_assumptions
from potentials.families import PotentialSpec
from solvers.barycenter import barycenter
from solvers.limit import solve_limit_ground_state
from solvers.refine import refine_critical
from solvers.solution import Solution
from utils.defaults import (
    DEFAULT_SEED,
    DEFAULT_THREADS,
    DISTINCT_PROFILE_TOL,
    MAX_ITERATIONS,
    MULTI_START,
    RESIDUAL_TOL,
)
from utils.errors import KirchhoffError, PotentialError, RegimeError

logger = logging.getLogger(__name__)

# Random starts and translates stay within this distance of the origin
START_SPREAD = 2.0


def build_starts(limit: Field, starts: int, seed: int, c: float) -> List[Field]:
    """
    Start fields for multi-start minimization, all drawn before any run.

    Start 0 is the limit ground state, odd starts translate it by a random
    vector in [-2, 2]^N and even starts are random positive bump sums.
    """
    rng = np.random.default_rng(seed)
    fields = [limit]
    for i in range(1, starts):
        if i % 2 == 1:
            shift = rng.uniform(-START_SPREAD, START_SPREAD, size=limit.grid.dim)
            fields.append(project_mass(translate(limit, shift), c))
        else:
            fields.append(project_mass(random_smooth_field(limit.grid, rng, START_SPREAD), c))
    return fields


def count_distinct_profiles(fields: Sequence[Field], c: float, tol: float = DISTINCT_PROFILE_TOL) -> int:
    """Number of profiles distinct in L2 after centering at the barycenter, modulo sign."""
    centered = [translate(u, [-x for x in barycenter(u)]) for u in fields]
    representatives: List[Field] = []
    scale = np.sqrt(c)
    for u in centered:
        duplicate = any(
            min(
                l2_norm_array(u.grid, u.samples - v.samples),
                l2_norm_array(u.grid, u.samples + v.samples),
            )
            <= tol * scale
            for v in representatives
        )
        if not duplicate:
            representatives.append(u)
    return len(representatives)


def _run_start(
    index: int,
    u0: Field,
    params: KirchhoffParams,
    spec: PotentialSpec,
    tol: float,
    max_iterations: int,
) -> Optional[Solution]:
    try:
        solution = refine_critical(
            u0,
            params,
            spec,
            level_tag="global_min",
            tol=tol,
            max_iterations=max_iterations,
            fiber=False,
        )
    except KirchhoffError as exc:
        logger.warning("⚠️ start %d failed: %s", index, exc)
        return None
    logger.info(
        "start %d: level=%.12g residual=%.3e converged=%s",
        index,
        solution.level,
        solution.el_residual,
        solution.converged,
    )
    return solution


def minimize_global(
    params: KirchhoffParams,
    spec: PotentialSpec,
    grid: Grid,
    starts: int = MULTI_START,
    *,
    seed: int = DEFAULT_SEED,
    threads: int = DEFAULT_THREADS,
    tol: float = RESIDUAL_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> Solution:
    """
    Best of `starts` projected descent runs for the global minimum l_c.

    Args:
        params: Subcritical Kirchhoff constants
        spec: Perturbation with h >= 0
        grid: Grid for the fields
        starts: Number of starts
        seed: Seed of the start generator
        threads: Worker threads; results do not depend on it
        tol: Relative residual target
        max_iterations: Cap on descent steps per start

    Returns:
        The converged Solution of lowest level (the lowest unconverged one
        carrying its failure when no start converges), with extras
        limit_level, limit_energy (I(u_oo)), below_limit_start and
        distinct_profiles

    Raises:
        RegimeError: If p >= 2 + 4/N
        PotentialError: If h is not nonnegative
        AssumptionError: If h is not integrable
    """
    if params.regime != "subcritical":
        raise RegimeError(
            f"global minimization needs p < {params.p_mass_critical:.6g}, got p={params.p}",
            {"field": "params.p"},
        )
    if spec.sign != "nonneg" and not spec.vanishes:
        raise PotentialError(
            "global minimization needs h >= 0", {"field": "potential.sign"}
        )
    if starts < 1:
        raise ValueError(f"starts must be at least 1, got {starts}")
    check_assumptions(spec, params, grid=grid).require("potential_integrable")

    limit = solve_limit_ground_state(params, grid, tol=tol, max_iterations=max_iterations)
    fields = build_starts(limit.field, starts, seed, params.c)

    logger.info("🔄 minimizing from %d starts on %d threads", starts, threads)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(
            pool.map(
                lambda item: _run_start(item[0], item[1], params, spec, tol, max_iterations),
                enumerate(fields),
            )
        )

    solutions = [s for s in results if s is not None]
    if not solutions:
        raise KirchhoffError("every start failed", {"starts": starts})
    converged = [s for s in solutions if s.converged]
    best = min(converged or solutions, key=lambda s: s.level)

    limit_energy = energy(limit.field, params, spec).total
    extras: Dict[str, Any] = {
        "limit_level": limit.level,
        "limit_energy": limit_energy,
        "below_limit_start": best.level <= limit_energy,
        "starts": starts,
        "converged_starts": len(converged),
        "seed": seed,
        "distinct_profiles": count_distinct_profiles([s.field for s in converged], params.c)
        if converged
        else 0,
    }
    logger.info(
        "✅ l_c = %.12g (l_oo,c = %.12g, %d/%d starts converged)",
        best.level,
        limit.level,
        len(converged),
        starts,
    )
    return replace(best, extras={**best.extras, **extras})


def level_sweep(
    params: KirchhoffParams, grid: Grid, masses: Sequence[float], **kwargs
) -> List[Tuple[float, float]]:
    """Rows (c, l_{oo,c}) of the limit level over a list of masses."""
    rows = []
    for c in masses:
        solution = solve_limit_ground_state(params.with_mass(c), grid, **kwargs)
        rows.append((float(c), solution.level))
    return rows


def check_superadditivity(
    params: KirchhoffParams,
    spec: PotentialSpec,
    grid: Grid,
    c1: float,
    c2: float,
    **kwargs,
) -> Dict[str, Any]:
    """
    Compare l_{c1+c2} with l_{c1} + l_{oo,c2}.

    The inequality l_{c1+c2} <= l_{c1} + l_{oo,c2} is what keeps minimizing
    sequences from splitting mass off to infinity.

    Returns:
        Dictionary with lhs, rhs, margin (rhs - lhs), holds, the per-solve
        converged flags (whole, first, second_limit) and converged, their
        conjunction; holds is False unless every solve converged
    """
    whole = minimize_global(params.with_mass(c1 + c2), spec, grid, **kwargs)
    first = minimize_global(params.with_mass(c1), spec, grid, **kwargs)
    limit_kwargs = {k: kwargs[k] for k in ("tol", "max_iterations") if k in kwargs}
    second = solve_limit_ground_state(params.with_mass(c2), grid, **limit_kwargs)
    flags = {
        "whole": whole.converged,
        "first": first.converged,
        "second_limit": second.converged,
    }
    converged = all(flags.values())
    if not converged:
        logger.warning("⚠️ superadditivity solves did not all converge: %s", flags)
    lhs, rhs = whole.level, first.level + second.level
    return {
        "lhs": lhs,
        "rhs": rhs,
        "margin": rhs - lhs,
        "holds": converged and lhs <= rhs,
        "converged_flags": flags,
        "converged": converged,
    }
