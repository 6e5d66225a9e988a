"""
Mountain-pass solution of the supercritical problem with h >= 0.

Stage 1 builds the path t -> t * u0 between a point of small gradient norm
(inside the positive region of phi) and a point below phi(t1), and relaxes
it: the path is carried by its shape u, its nodes are evaluated along the
fiber of u without resampling, and the shape descends on the fiber maxima
until the path maximum stops moving. Stage 2 refines the maximal node into
a critical point.
"""

import logging
from collections import deque
from dataclasses import replace
from typing import Any, Dict, Optional

import numpy as np

from fields.field import Field, grad_norm_sq, project_mass
from fields.grid import Grid
from functionals.params import KirchhoffParams
from landscape.profile import LandscapeProfile, fiber_energies, fiber_energy, phi_profile
from landscape.thresholds import mountain_pass_multiplier_bound
from potentials.assumptions import check_assumptions
from potentials.families import PotentialSpec
from solvers.descent import ProjectedDescent
from solvers.limit import solve_limit_ground_state
from solvers.refine import refine_critical
from solvers.solution import Solution
from utils.defaults import (
    MAX_ITERATIONS,
    MAX_PATH_SWEEPS,
    PATH_NODES,
    PATH_STABLE_SWEEPS,
    PATH_STABLE_TOL,
    RESIDUAL_TOL,
)
from utils.errors import PathCollapseError, PotentialError, RegimeError

logger = logging.getLogger(__name__)


def path_parameters(
    u: Field,
    params: KirchhoffParams,
    spec: PotentialSpec,
    profile: LandscapeProfile,
    nodes: int = PATH_NODES,
) -> np.ndarray:
    """
    Fiber parameters t_k of the path nodes t_k * u on a log grid.

    The first node has |grad|_2 = iota / 2 with iota = r1 / 2 (or t2 / 100
    when r1 = 0); the last is the first doubling of t with I(t * u) < phi(t1).

    Raises:
        PathCollapseError: If no endpoint below phi(t1) is found
    """
    G = grad_norm_sq(u)
    iota = 0.5 * profile.r1 if profile.r1 > 0 else 1e-2 * profile.t2
    t_lo = 0.5 * iota / np.sqrt(G)
    floor = float(profile.phi(profile.t1))

    t_hi = 1.0
    for _ in range(60):
        if fiber_energy(u, t_hi, params, spec) < floor:
            break
        t_hi *= 2.0
    else:
        raise PathCollapseError(
            "path-collapse: no path endpoint falls below phi(t1)",
            {"t_hi": t_hi, "phi_t1": floor},
        )
    return np.geomspace(t_lo, t_hi, nodes)


def mountain_pass(
    params: KirchhoffParams,
    spec: PotentialSpec,
    grid: Grid,
    *,
    nodes: int = PATH_NODES,
    tol: float = RESIDUAL_TOL,
    max_iterations: int = MAX_ITERATIONS,
    max_sweeps: int = MAX_PATH_SWEEPS,
    c_np: Optional[float] = None,
) -> Solution:
    """
    Mountain-pass critical point at level m_{h,c}.

    Args:
        params: Supercritical Kirchhoff constants
        spec: Perturbation with h >= 0
        grid: Grid for the fields
        nodes: Number of path nodes
        tol: Relative residual target
        max_iterations: Cap on refinement steps
        max_sweeps: Cap on path relaxation sweeps
        c_np: Gagliardo-Nirenberg constant (computed on the grid if omitted)

    Returns:
        Solution tagged mountain_pass with extras path_estimate, path,
        m_c, multiplier_bound, multiplier_bound_holds and profile

    Raises:
        RegimeError: If p <= 2 + 8/N
        PotentialError: If h is not nonnegative
        AssumptionError: If an assumption or the landscape geometry fails
    """
    if params.regime != "supercritical":
        raise RegimeError(
            f"the mountain pass needs p > {params.p_bar:.6g}, got p={params.p}",
            {"field": "params.p"},
        )
    if spec.sign != "nonneg" and not spec.vanishes:
        raise PotentialError("the mountain pass needs h >= 0", {"field": "potential.sign"})

    limit = solve_limit_ground_state(params, grid, tol=tol, max_iterations=max_iterations)
    m_c = limit.level
    report = check_assumptions(spec, params, m_c, grid=grid, c_np=c_np)
    report.require("radial_term_integrable", "landscape_gap", "radial_derivative_bound")
    profile = phi_profile(params, spec, grid, c_np=c_np, m_c=m_c)

    descent = ProjectedDescent(
        limit.field, params, spec, fiber=True, tol=tol, max_iterations=max_sweeps
    )
    history: deque = deque(maxlen=PATH_STABLE_SWEEPS + 1)
    ts = energies = None
    for sweep in range(max_sweeps + 1):
        u = descent.u
        ts = path_parameters(u, params, spec, profile, nodes)
        energies = fiber_energies(u, ts, params, spec)
        k = int(np.argmax(energies))
        if k in (0, len(ts) - 1):
            raise PathCollapseError(
                "path-collapse: the path maximum sits at an endpoint",
                {"node": k, "t": float(ts[k]), "energy": float(energies[k])},
            )
        history.append(descent.objective_value)
        if len(history) == history.maxlen and max(history) - min(history) < PATH_STABLE_TOL * max(
            1.0, abs(history[-1])
        ):
            break
        if sweep == max_sweeps or descent.step() is not None:
            break
    logger.info(
        "path relaxed after %d sweeps: node max=%.12g fiber max=%.12g",
        descent.iterations,
        float(np.max(energies)),
        descent.objective_value,
    )

    extras: Dict[str, Any] = {
        "path_estimate": float(np.max(energies)),
        "path": {"t": ts.tolist(), "energy": energies.tolist()},
        "path_sweeps": descent.iterations,
        "m_c": m_c,
        "profile": profile.to_dict(),
        "assumptions": report.model_dump(),
    }
    solution = refine_critical(
        project_mass(descent.u, params.c),
        params,
        spec,
        level_tag="mountain_pass",
        tol=tol,
        max_iterations=max_iterations,
        fiber=True,
    )
    bound = mountain_pass_multiplier_bound(params, solution.level, report.norms["norm_radial"])
    extras["multiplier_bound"] = bound
    extras["multiplier_bound_holds"] = solution.lam >= bound - tol * abs(bound)
    logger.info(
        "✅ m_h,c = %.12g (m_c = %.12g), lambda = %.12g >= %.12g",
        solution.level,
        m_c,
        solution.lam,
        bound,
    )
    return replace(solution, extras={**solution.extras, **extras})
