"""
Projected gradient flow on the mass sphere S_c.

Each step moves against the tangential gradient g = grad I(u) + lambda u and
projects back onto S_c. Steps are Barzilai-Borwein with a nonmonotone Armijo
line search. Two metrics are used:

- Sobolev-preconditioned (default): d = P g made tangent, with
  P = (sigma + (a + b G) |k|^2)^{-1} applied in Fourier space.
- L2 with a proximal step (h <= 0 and not identically zero): the absorbing
  term (1/q) int hbar |u|^q is convex but not C^2 at u = 0, so it is handled
  by its pointwise proximal map and the solution keeps its dead core.

In fiber mode (supercritical ground states and saddles) every iterate is
first moved to the maximizer of t -> I(t * u), so the descent runs on the
Pohozaev manifold and the objective is the fiber maximum.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Deque, Optional, Tuple

import numpy as np

from fields.field import (
    Field,
    apply_symbol,
    even_part,
    grad_norm_sq,
    is_even,
    l2_norm_array,
    project_mass,
    scale_fiber,
)
from functionals.energy import ZERO_POTENTIAL, energy, free_gradient
from functionals.params import KirchhoffParams
from landscape.profile import fiber_argmax
from potentials.families import PotentialSpec, potential_on_grid
from solvers.solution import residual_target
from utils.defaults import (
    ARMIJO_SLOPE,
    BB_STEP_RANGE,
    FIBER_BRACKET,
    INITIAL_STEP_FACTOR,
    LOCAL_FIBER_BRACKET,
    MAX_BACKTRACKS,
    MAX_ITERATIONS,
    NONMONOTONE_WINDOW,
    PRECONDITIONED_STEP,
    RESIDUAL_TOL,
)
from utils.errors import ZeroFieldError

logger = logging.getLogger(__name__)

LOCAL_FIBER_POINTS = 21


def prox_absorbing(w: np.ndarray, weight: np.ndarray, q: float) -> np.ndarray:
    """
    Pointwise minimizer of 1/2 (rho - w)^2 + weight |rho|^q / q.

    The minimizer has the sign of w and modulus r solving r + weight r^{q-1} = |w|
    (r = 0 where weight dominates). q = 1 is soft thresholding and q = 3/2 has a
    closed form; other q use bisection on [0, |w|].
    """
    modulus = np.abs(w)
    weight = np.broadcast_to(weight, w.shape)
    if q == 1.0:
        r = np.maximum(modulus - weight, 0.0)
    elif q == 1.5:
        root = weight + np.sqrt(weight**2 + 4.0 * modulus)
        s = np.divide(2.0 * modulus, root, out=np.zeros_like(modulus), where=root > 0)
        r = s**2
    else:
        lo = np.zeros_like(modulus)
        hi = modulus.copy()
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            too_big = mid + weight * mid ** (q - 1.0) > modulus
            hi = np.where(too_big, mid, hi)
            lo = np.where(too_big, lo, mid)
        r = 0.5 * (lo + hi)
    return np.sign(w) * r


@dataclass(frozen=True)
class DescentResult:
    """Final iterate of a ProjectedDescent run."""

    field: Field
    iterations: int
    residual: float
    converged: bool
    reason: str
    objective: float


class ProjectedDescent:
    """
    Nonmonotone Barzilai-Borwein descent for I on S_c.

    Args:
        u0: Start field; projected onto S_c (and onto even functions when symmetric)
        params: Kirchhoff constants
        spec: Perturbation h
        fiber: Keep iterates on the fiber maxima (supercritical problems)
        symmetric: Project onto even functions; defaults to "spec and u0 are even"
        preconditioned: Use the Sobolev metric unless h is absorbing
        tol: Relative residual target, see solvers.solution.residual_target
        max_iterations: Cap on accepted steps
        fiber_bracket: Bracket for the first fiber maximization
    """

    def __init__(
        self,
        u0: Field,
        params: KirchhoffParams,
        spec: PotentialSpec,
        *,
        fiber: bool = False,
        symmetric: Optional[bool] = None,
        preconditioned: bool = True,
        tol: float = RESIDUAL_TOL,
        max_iterations: int = MAX_ITERATIONS,
        fiber_bracket: Tuple[float, float] = FIBER_BRACKET,
    ):
        if u0.is_zero():
            raise ZeroFieldError("zero-field: descent needs a nonzero start")
        self.params = params
        self.spec = spec
        self.fiber = fiber
        self.symmetric = (spec.is_even and is_even(u0)) if symmetric is None else symmetric
        self.absorbing = spec.sign == "nonpos" and not spec.vanishes
        self.preconditioned = preconditioned and not self.absorbing
        self.tol = tol
        self.max_iterations = max_iterations

        grid = u0.grid
        if self.absorbing:
            self.hbar = -potential_on_grid(spec, grid)
            stiffness = params.a + params.b * grad_norm_sq(u0)
            self.tau0 = INITIAL_STEP_FACTOR * grid.spacing**2 / stiffness
        else:
            self.hbar = None
            self.tau0 = PRECONDITIONED_STEP
        self.tau = self.tau0

        u = self._clean(u0)
        if fiber:
            u = self._materialize(u, fiber_bracket, warn=True)
        self.u = u
        self.iterations = 0
        self.residual = np.inf
        self.objective_value = self.objective(u)
        self._window: Deque[float] = deque([self.objective_value], maxlen=NONMONOTONE_WINDOW)
        self._previous: Optional[Tuple[np.ndarray, np.ndarray]] = None

    # -------------------------------------------------------------------------
    # Pieces
    # -------------------------------------------------------------------------

    def _clean(self, u: Field) -> Field:
        if self.symmetric:
            u = even_part(u)
        return project_mass(u, self.params.c)

    def _materialize(
        self,
        u: Field,
        bracket: Tuple[float, float] = LOCAL_FIBER_BRACKET,
        warn: bool = False,
    ) -> Field:
        """Replace u by t* * u with t* the fiber maximizer."""
        t_star, _ = fiber_argmax(
            u, self.params, self.spec, bracket=bracket, points=LOCAL_FIBER_POINTS, warn=warn
        )
        if abs(t_star - 1.0) <= 1e-12:
            return u
        return self._clean(scale_fiber(u, t_star))

    def objective(self, u: Field) -> float:
        if self.fiber:
            _, value = fiber_argmax(
                u,
                self.params,
                self.spec,
                bracket=LOCAL_FIBER_BRACKET,
                points=LOCAL_FIBER_POINTS,
                warn=False,
            )
            return value
        return energy(u, self.params, self.spec).total

    def _gradient(self, u: Field) -> Tuple[np.ndarray, float, np.ndarray]:
        """Tangential gradient g, the multiplier and the smooth part's gradient."""
        s = u.samples
        full = free_gradient(u, self.params, self.spec)
        lam = -float(np.sum(full * s)) / float(np.sum(s * s))
        g = full + lam * s
        if self.absorbing:
            smooth = free_gradient(u, self.params, ZERO_POTENTIAL)
        else:
            smooth = full
        return g, lam, smooth

    def _symbol(self, u: Field, lam: float) -> np.ndarray:
        grid = u.grid
        stiffness = self.params.a + self.params.b * grad_norm_sq(u)
        sigma = max(lam, stiffness * (np.pi / grid.half_width) ** 2)
        return sigma + stiffness * grid.k_squared

    def _bb_step(self, s_vec: np.ndarray, y_vec: np.ndarray, metric: Optional[np.ndarray], u: Field) -> float:
        if metric is None:
            num = float(np.sum(s_vec * s_vec))
        else:
            num = float(np.sum(s_vec * apply_symbol(u.grid, s_vec, metric)))
        den = float(np.sum(s_vec * y_vec))
        if den <= 0 or num <= 0:
            return self.tau0
        lo, hi = BB_STEP_RANGE
        return float(np.clip(num / den, lo * self.tau0, hi * self.tau0))

    # -------------------------------------------------------------------------
    # Iteration
    # -------------------------------------------------------------------------

    def step(self) -> Optional[str]:
        """
        One accepted step.

        Returns:
            None to continue, or the reason the run stops
        """
        u = self.u
        g, lam, smooth = self._gradient(u)
        self.residual = l2_norm_array(u.grid, g)
        if self.residual <= residual_target(u, self.params, self.tol):
            return "converged"

        if self.fiber:
            moved = self._materialize(u)
            if moved is not u:
                u = moved
                self.u = u
                self.objective_value = self.objective(u)
                g, lam, smooth = self._gradient(u)

        metric = None if self.absorbing or not self.preconditioned else self._symbol(u, lam)
        if self._previous is not None:
            s_prev, g_prev = self._previous
            self.tau = self._bb_step(u.samples - s_prev, g - g_prev, metric, u)

        if metric is None:
            direction = g
            slope = None
        else:
            pg = apply_symbol(u.grid, g, 1.0 / metric)
            pu = apply_symbol(u.grid, u.samples, 1.0 / metric)
            direction = pg - (float(np.sum(pg * u.samples)) / float(np.sum(pu * u.samples))) * pu
            slope = float(np.sum(g * direction)) * u.grid.cell_volume

        reference = max(self._window)
        tau = self.tau
        for _ in range(MAX_BACKTRACKS):
            if self.absorbing:
                w = u.samples - tau * (smooth + lam * u.samples)
                trial = prox_absorbing(w, tau * self.hbar, self.params.q)
            else:
                trial = u.samples - tau * direction
            if np.any(trial):
                u_try = self._clean(u.with_samples(trial))
                value = self.objective(u_try)
                if slope is None:
                    decrease = ARMIJO_SLOPE / (2.0 * tau) * l2_norm_array(
                        u.grid, u_try.samples - u.samples
                    ) ** 2
                else:
                    decrease = ARMIJO_SLOPE * tau * slope
                if value <= reference - decrease:
                    break
            tau *= 0.5
        else:
            return "line-search"

        self._previous = (u.samples, g)
        self.u = u_try
        self.objective_value = value
        self._window.append(value)
        self.iterations += 1
        if self.iterations % 100 == 0:
            logger.debug(
                "descent %d: objective=%.12g residual=%.3e tau=%.3e",
                self.iterations,
                value,
                self.residual,
                tau,
            )
        return None

    def run(self) -> DescentResult:
        reason = "max-iterations"
        while self.iterations < self.max_iterations:
            stop = self.step()
            if stop is not None:
                reason = stop
                break
        else:
            g, _, _ = self._gradient(self.u)
            self.residual = l2_norm_array(self.u.grid, g)

        converged = self.residual <= residual_target(self.u, self.params, self.tol)
        logger.info(
            "descent stopped (%s) after %d steps: objective=%.12g residual=%.3e",
            reason,
            self.iterations,
            self.objective_value,
            self.residual,
        )
        return DescentResult(
            field=self.u,
            iterations=self.iterations,
            residual=self.residual,
            converged=converged,
            reason="converged" if converged else reason,
            objective=self.objective_value,
        )
