"""
Check groups of the verification workflow.

Every node reads the run configuration from the state, runs the solver
calls its group needs and returns {"checks": [...]}. A group that is not
selected passes through; a group that raises records one failed check named
after the group and the workflow carries on.
"""

import functools
import logging
from typing import Any, Callable, Dict, List

import numpy as np

from fields.field import grad_norm_sq, lp_norm_p, mass, project_mass, random_smooth_field, scale_fiber
from functionals.energy import energy, pohozaev
from graph.state import Check, VerificationReport, VerificationState
from landscape.gn import weinstein_quotient
from landscape.profile import energy_lower_bound, fiber_energies, phi_profile
from potentials.assumptions import AssumptionReport, check_assumptions
from solvers.limit import solve_limit_ground_state
from solvers.linking import linking_level, refine_linking_candidate
from solvers.minimize import check_superadditivity, minimize_global
from solvers.mountain_pass import mountain_pass
from utils.defaults import POHOZAEV_TOL
from utils.run_context import get_run_context

logger = logging.getLogger(__name__)

# Random fields per identity check and the fiber parameters they are scaled by
IDENTITY_FIELDS = 20
SCALING_FACTORS = (0.75, 1.5)
FIBER_STEP = 1e-4

Node = Callable[[VerificationState], Dict[str, Any]]


def check_group(group: str) -> Callable[[Callable[[VerificationState], List[Check]]], Node]:
    """Wrap a check producer as a graph node for `group`."""

    def decorator(func: Callable[[VerificationState], List[Check]]) -> Node:
        @functools.wraps(func)
        def node(state: VerificationState) -> Dict[str, Any]:
            if group not in state["groups"]:
                return {"checks": []}
            logger.info("🔄 running check group %s", group)
            try:
                checks = func(state)
            except Exception as e:
                logger.warning("❌ check group %s raised: %s", group, e)
                checks = [Check.failure(group, f"{type(e).__name__}: {e}")]
            logger.info(
                "✅ %s: %d/%d checks pass",
                group,
                sum(c.passed for c in checks),
                len(checks),
            )
            return {"checks": checks}

        return node

    return decorator


def _setup(state: VerificationState):
    config = state["config"]
    return config, config.kirchhoff_params(), config.potential, config.grid.to_grid()


def _condition_check(report: AssumptionReport, name: str) -> Check:
    result = report[name]
    return Check(
        name=name,
        lhs=result.attained,
        rhs=result.threshold,
        relation="<",
        passed=result.passed,
        note=f"{result.status}: {result.note}" if result.note else result.status,
    )


# =============================================================================
# Identities
# =============================================================================


@check_group("identities")
def identities_node(state: VerificationState) -> List[Check]:
    """Scaling identities, the Gagliardo-Nirenberg bound and P against the fiber derivative."""
    config, params, spec, grid = _setup(state)
    rng = np.random.default_rng(config.solver.seed)
    L = grid.half_width
    fields = [
        project_mass(random_smooth_field(grid, rng, L / 20.0, (L / 10.0, L / 7.0)), params.c)
        for _ in range(IDENTITY_FIELDS)
    ]
    c_np = get_run_context().gn_constant(params.dim, params.p, grid)

    worst_mass = worst_grad = worst_power = worst_gn = worst_fiber = 0.0
    for u in fields:
        G, Pp = grad_norm_sq(u), lp_norm_p(u, params.p)
        for t in SCALING_FACTORS:
            v = scale_fiber(u, t)
            worst_mass = max(worst_mass, abs(mass(v) - params.c) / params.c)
            worst_grad = max(worst_grad, abs(grad_norm_sq(v) - t**2 * G) / (t**2 * G))
            expected = t ** (params.p * params.gamma_p) * Pp
            worst_power = max(worst_power, abs(lp_norm_p(v, params.p) - expected) / expected)
        worst_gn = max(worst_gn, weinstein_quotient(u, params.p) / c_np - 1.0)

        lo, hi = fiber_energies(u, [1.0 - FIBER_STEP, 1.0 + FIBER_STEP], params, spec)
        derivative = (hi - lo) / (2.0 * FIBER_STEP)
        stiffness = params.a * G + params.b * G**2
        worst_fiber = max(worst_fiber, abs(pohozaev(u, params, spec) - derivative) / stiffness)

    checks = [
        Check.compare("scaling_mass", worst_mass, 0.0, "<=", 1e-6, "t * u preserves the mass"),
        Check.compare(
            "scaling_gradient", worst_grad, 0.0, "<=", 1e-4, "|grad t*u|^2 = t^2 |grad u|^2"
        ),
        Check.compare(
            "scaling_power", worst_power, 0.0, "<=", 1e-4, "int |t*u|^p = t^{p gamma_p} int |u|^p"
        ),
        Check.compare(
            "gagliardo_nirenberg", worst_gn, 0.0, "<=", 1e-8, "Weinstein quotient never exceeds C_{N,p}"
        ),
        Check.compare(
            "pohozaev_fiber_derivative", worst_fiber, 0.0, "<=", 2e-3, "P(u) = d/dt I(t * u) at t = 1"
        ),
    ]

    if params.regime == "supercritical" and (spec.sign == "nonneg" or spec.vanishes):
        profile = phi_profile(params, spec, grid, c_np=c_np)
        gap = max(
            energy_lower_bound(u, profile) - energy(u, params, spec).total for u in fields
        )
        checks.append(
            Check.compare("energy_lower_bound", gap, 0.0, "<=", 1e-10, "phi(|grad u|_2) <= I(u) on S_c")
        )
    return checks


# =============================================================================
# Subcritical
# =============================================================================


@check_group("subcritical")
def subcritical_node(state: VerificationState) -> List[Check]:
    """l_c < l_{oo,c} < 0, strict sub-additivity and the superadditivity inequality."""
    config, params, spec, grid = _setup(state)
    solver = config.solver
    if params.regime != "subcritical":
        return [Check.failure("subcritical", f"p={params.p} is not subcritical")]
    kwargs = {"tol": solver.residual_tol, "max_iterations": solver.max_iterations}

    limit = solve_limit_ground_state(params, grid, **kwargs)
    best = minimize_global(
        params, spec, grid, solver.starts, seed=solver.seed, threads=solver.threads, **kwargs
    )
    checks = [
        Check.compare(
            "global_below_limit",
            best.level,
            limit.level,
            "approx" if spec.vanishes else "<",
            1e-4,
            "l_c < l_{oo,c} (l_c = l_{oo,c} when h = 0)",
            converged=best.converged and limit.converged,
        ),
        Check.compare(
            "limit_level_negative",
            limit.level,
            0.0,
            "<",
            0.0,
            "l_{oo,c} < 0",
            converged=limit.converged,
        ),
    ]

    c1, c2 = solver.superadditivity_masses
    whole = solve_limit_ground_state(params.with_mass(c1 + c2), grid, **kwargs)
    first = solve_limit_ground_state(params.with_mass(c1), grid, **kwargs)
    second = solve_limit_ground_state(params.with_mass(c2), grid, **kwargs)
    checks.append(
        Check.compare(
            "limit_subadditivity",
            whole.level,
            first.level + second.level,
            "<",
            0.0,
            "l_{oo,c1+c2} < l_{oo,c1} + l_{oo,c2}",
            converged=whole.converged and first.converged and second.converged,
        )
    )
    if not spec.vanishes:
        result = check_superadditivity(
            params, spec, grid, c1, c2, seed=solver.seed, threads=solver.threads, **kwargs
        )
        checks.append(
            Check.compare(
                "superadditivity",
                result["lhs"],
                result["rhs"],
                "<=",
                0.0,
                "l_{c1+c2} <= l_{c1} + l_{oo,c2}",
                converged=result["converged"],
            )
        )
    return checks


# =============================================================================
# Supercritical
# =============================================================================


@check_group("supercritical_positive")
def supercritical_positive_node(state: VerificationState) -> List[Check]:
    """Landscape geometry, m_{h,c} < m_c and the multiplier of the mountain-pass solution."""
    config, params, spec, grid = _setup(state)
    solver = config.solver
    if params.regime != "supercritical" or not (spec.sign == "nonneg" or spec.vanishes):
        return [Check.failure("supercritical_positive", "needs p > 2 + 8/N and h >= 0")]
    kwargs = {"tol": solver.residual_tol, "max_iterations": solver.max_iterations}

    limit = solve_limit_ground_state(params, grid, **kwargs)
    m_c = limit.level
    report = check_assumptions(spec, params, m_c, grid=grid)
    checks = [_condition_check(report, name) for name in ("landscape_gap", "radial_derivative_bound")]

    profile = phi_profile(params, spec, grid, m_c=m_c)
    if not spec.vanishes:
        checks += [
            Check.compare("landscape_t1_below_r1", profile.t1, profile.r1, "<", 0.0, "0 < t1 < r1"),
            Check.compare("landscape_r1_below_t2", profile.r1, profile.t2, "<", 0.0, "r1 < t2"),
            Check.compare("landscape_t2_below_r2", profile.t2, profile.r2, "<", 0.0, "t2 < r2"),
            Check.compare(
                "local_minimum_negative",
                float(profile.phi(profile.t1)),
                0.0,
                "<",
                0.0,
                "phi has a local strict minimum at a negative level",
            ),
        ]

    solution = mountain_pass(
        params,
        spec,
        grid,
        nodes=solver.path_nodes,
        max_sweeps=solver.max_path_sweeps,
        **kwargs,
    )
    checks += [
        Check.compare(
            "mountain_pass_below_m_c",
            solution.level,
            m_c,
            "<" if not spec.vanishes else "approx",
            1e-5 if not spec.vanishes else 1e-4,
            "m_{h,c} < m_c (m_{h,c} = m_c when h = 0)",
            converged=solution.converged and limit.converged,
        ),
        Check.compare(
            "mountain_pass_pohozaev",
            solution.pohozaev_residual,
            POHOZAEV_TOL,
            "<=",
            0.0,
            "P(u) = 0 at the mountain-pass solution",
            converged=solution.converged,
        ),
        Check.compare(
            "mountain_pass_multiplier_positive",
            0.0,
            solution.lam,
            "<",
            0.0,
            "lambda > 0",
            converged=solution.converged,
        ),
        Check.compare(
            "mountain_pass_multiplier_bound",
            solution.extras["multiplier_bound"],
            solution.lam,
            "<=",
            solver.residual_tol * abs(solution.extras["multiplier_bound"]),
            "lambda c above the mountain-pass lower bound",
            converged=solution.converged,
        ),
    ]
    return checks


@check_group("supercritical_negative")
def supercritical_negative_node(state: VerificationState) -> List[Check]:
    """The linking bound on hbar, the level bracket and the linking multiplier."""
    config, params, spec, grid = _setup(state)
    solver = config.solver
    if params.regime != "supercritical" or not (spec.sign == "nonpos" or spec.vanishes):
        return [Check.failure("supercritical_negative", "needs p > 2 + 8/N and h <= 0")]
    kwargs = {"tol": solver.residual_tol, "max_iterations": solver.max_iterations}

    limit = solve_limit_ground_state(params, grid, **kwargs)
    report = check_assumptions(spec, params, limit.level, grid=grid)
    checks = [_condition_check(report, "linking_bound")]

    bracket = linking_level(
        params,
        spec,
        grid,
        solver.R,
        solver.s1,
        solver.s2,
        solver.grid_Q,
        solver.epsilon,
        limit.field,
    )
    checks += [
        Check.compare(
            "boundary_below_interior",
            bracket.boundary_max,
            bracket.interior_max,
            "<",
            0.0,
            "sup over the boundary of Q below the surface maximum",
            converged=limit.converged,
        ),
        Check.compare(
            "boundary_below_m_c_plus_epsilon",
            bracket.boundary_max,
            bracket.m_c + bracket.epsilon,
            "<",
            0.0,
            "sup over the boundary of Q below m_c + epsilon",
            converged=limit.converged,
        ),
        Check.compare(
            "linking_above_m_c",
            bracket.m_c,
            bracket.interior_max,
            "<",
            0.0,
            "m_c < L_{h,c}",
            converged=limit.converged,
        ),
        Check.compare(
            "linking_below_2m_c",
            bracket.interior_max,
            2.0 * bracket.m_c,
            "<",
            0.0,
            "L_{h,c} < 2 m_c",
            converged=limit.converged,
        ),
        Check.compare(
            "linking_below_upper_bound",
            bracket.interior_max,
            bracket.upper_bound_L,
            "<=",
            0.0,
            "L_{h,c} <= m_c + ||hbar|| c^{q/2} / q",
            converged=limit.converged,
        ),
    ]

    if solver.refine_linking:
        solution = refine_linking_candidate(params, spec, grid, bracket, limit.field, **kwargs)
        checks.append(
            Check.compare(
                "linking_multiplier_positive",
                0.0,
                solution.lam,
                "<",
                0.0,
                "lambda > 0 for the linking candidate",
                converged=solution.converged,
            )
        )
        if "multiplier_bound" in solution.extras:
            bound = solution.extras["multiplier_bound"]
            checks.append(
                Check.compare(
                    "linking_multiplier_bound",
                    bound,
                    solution.lam,
                    "<=",
                    solver.residual_tol * abs(bound),
                    "lambda c above the linking lower bound",
                    converged=solution.converged,
                )
            )
    return checks


def report_node(state: VerificationState) -> Dict[str, Any]:
    """Reduce the accumulated checks into the report."""
    report = VerificationReport(checks=state["checks"], groups=state["groups"])
    status = "✅" if report.passed else "❌"
    logger.info(
        "%s verification: %d checks, %d failed", status, len(report.checks), len(report.failures())
    )
    return {"report": report}
