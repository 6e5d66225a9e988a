"""
The fiber landscape of the supercritical problem with h >= 0.

Gagliardo-Nirenberg and Hoelder bound the energy from below on S_c by

    phi(t) = a/2 t^2 - k1 t^{p gamma_p} - k2 t^{q gamma_p},   t = |grad u|_2

and phi(t) = t^{q gamma_p} (psi(t) - k2). psi rises from 0 to its maximum
at t_bar and then falls to -infinity, so phi is positive exactly between
its two roots when k2 < psi(t_bar).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from fields.field import Field, grad_norm_sq, lp_norm_p
from fields.grid import Grid
from functionals.params import KirchhoffParams
from landscape.thresholds import (
    landscape_coefficients,
    landscape_threshold,
    linking_threshold,
    psi_t_bar,
    radial_derivative_threshold,
    t_bar,
)
from potentials.families import PotentialSpec, potential_values, radial_derivative_values
from potentials.norms import potential_norms
from utils.defaults import FIBER_BRACKET, FIBER_SCAN_POINTS, ROOT_RTOL
from utils.errors import NoPositiveRegionError, PotentialError, RegimeError
from utils.run_context import get_run_context

logger = logging.getLogger(__name__)


def phi(t, params: KirchhoffParams, k1: float, k2: float):
    t = np.asarray(t, dtype=float)
    g = params.gamma_p
    return 0.5 * params.a * t**2 - k1 * t ** (params.p * g) - k2 * t ** (params.q * g)


def psi(t, params: KirchhoffParams, k1: float):
    t = np.asarray(t, dtype=float)
    g = params.gamma_p
    qg = params.q * g
    return 0.5 * params.a * t ** (2.0 - qg) - k1 * t ** (params.p * g - qg)


@dataclass(frozen=True)
class LandscapeProfile:
    """Roots, extrema and thresholds of phi for one (params, h)."""

    params: KirchhoffParams
    gamma_p: float
    c_np: float
    norm_pq: float
    k1: float
    k2: float
    t_bar: float
    psi_t_bar: float
    t1: float
    t2: float
    r1: float
    r2: float
    thresholds: Dict[str, Optional[float]] = field(default_factory=dict)

    def phi(self, t):
        return phi(t, self.params, self.k1, self.k2)

    def psi(self, t):
        return psi(t, self.params, self.k1)

    def to_dict(self) -> dict:
        return {
            "params": self.params.describe(),
            "gamma_p": self.gamma_p,
            "c_np": self.c_np,
            "norm_p_over_pmq": self.norm_pq,
            "k1": self.k1,
            "k2": self.k2,
            "t_bar": self.t_bar,
            "psi_t_bar": self.psi_t_bar,
            "t1": self.t1,
            "t2": self.t2,
            "r1": self.r1,
            "r2": self.r2,
            "thresholds": dict(self.thresholds),
        }


def _golden_min(func: Callable[[float], float], ts: np.ndarray) -> float:
    """Minimizer of func near the best sample of ts, refined by golden section."""
    values = np.array([func(t) for t in ts])
    i = int(np.clip(np.argmin(values), 1, len(ts) - 2))
    result = optimize.minimize_scalar(
        func, bracket=(ts[i - 1], ts[i], ts[i + 1]), method="golden", tol=1e-12
    )
    return float(result.x)


def _expand_bracket(func: Callable[[float], float], start: float, factor: float) -> float:
    """Step geometrically from start until func < 0."""
    t = start
    for _ in range(400):
        t *= factor
        if func(t) < 0:
            return t
    raise ValueError(f"no sign change of the landscape function from t={start}")


def phi_profile(
    params: KirchhoffParams,
    spec: PotentialSpec,
    grid: Grid,
    *,
    c_np: Optional[float] = None,
    m_c: Optional[float] = None,
) -> LandscapeProfile:
    """
    Roots r1 < r2 and extrema t1 < t2 of phi, with t_bar and the thresholds.

    Args:
        params: Supercritical Kirchhoff constants
        spec: Potential with h >= 0
        grid: Grid for C_{N,p} and the potential norms
        c_np: Best Gagliardo-Nirenberg constant (computed when omitted)
        m_c: Limit mountain-pass level, fills the m_c-dependent thresholds

    Returns:
        LandscapeProfile; with h = 0, r1 = t1 = 0

    Raises:
        RegimeError: Outside the supercritical regime
        NoPositiveRegionError: If phi <= 0 for every t > 0
    """
    if params.regime != "supercritical":
        raise RegimeError(
            f"the fiber landscape needs p > {params.p_bar:.6g}, got p={params.p}",
            {"field": "params.p"},
        )
    if spec.sign != "nonneg" and not spec.vanishes:
        raise PotentialError(
            "the fiber landscape is defined for h >= 0", {"field": "potential.sign"}
        )
    if c_np is None:
        c_np = get_run_context().gn_constant(params.dim, params.p, grid)

    norms = potential_norms(spec, params.q, params.p, grid)
    k1, k2 = landscape_coefficients(params, c_np, norms.norm_p_over_pmq)
    tb = t_bar(params, c_np)
    psib = psi_t_bar(params, c_np)
    pg = params.p * params.gamma_p
    thresholds = {
        "landscape_gap": landscape_threshold(params, c_np),
        "radial_derivative_bound": radial_derivative_threshold(params, m_c) if m_c else None,
        "linking_bound": linking_threshold(params, m_c, norms.upsilon) if m_c else None,
    }

    if k2 == 0.0:
        r1 = t1 = 0.0
        r2 = (params.a / (2.0 * k1)) ** (1.0 / (pg - 2.0))
        t2 = (params.a / (k1 * pg)) ** (1.0 / (pg - 2.0))
    else:
        if k2 >= psib:
            raise NoPositiveRegionError(
                f"no-positive-region: ||h||_(p/(p-q)) = {norms.norm_p_over_pmq:.6g} "
                f"reaches the landscape threshold {thresholds['landscape_gap']:.6g}",
                {"k2": k2, "psi_t_bar": psib, **thresholds},
            )

        def gap(t: float) -> float:
            return float(psi(t, params, k1)) - k2

        lo = _expand_bracket(gap, tb, 0.5)
        hi = _expand_bracket(gap, tb, 2.0)
        r1 = optimize.bisect(gap, lo, tb, rtol=ROOT_RTOL, xtol=1e-300)
        r2 = optimize.bisect(gap, tb, hi, rtol=ROOT_RTOL, xtol=1e-300)

        def phi_at(t: float) -> float:
            return float(phi(t, params, k1, k2))

        t1 = _golden_min(phi_at, r1 * np.geomspace(1e-8, 1.0, 200)[1:-1])
        t2 = _golden_min(lambda t: -phi_at(t), np.geomspace(r1, r2, 200)[1:-1])

    logger.info(
        "landscape: r1=%.6g t2=%.6g r2=%.6g t_bar=%.6g psi(t_bar)=%.6g k2=%.6g",
        r1,
        t2,
        r2,
        tb,
        psib,
        k2,
    )
    return LandscapeProfile(
        params=params,
        gamma_p=params.gamma_p,
        c_np=c_np,
        norm_pq=norms.norm_p_over_pmq,
        k1=k1,
        k2=k2,
        t_bar=tb,
        psi_t_bar=psib,
        t1=t1,
        t2=t2,
        r1=r1,
        r2=r2,
        thresholds=thresholds,
    )


def phi_scan(profile: LandscapeProfile, ts: Sequence[float]) -> List[Tuple[float, float, float]]:
    """Rows (t, phi(t), psi(t)) for plotting."""
    ts = np.asarray(ts, dtype=float)
    return list(zip(ts.tolist(), profile.phi(ts).tolist(), profile.psi(ts).tolist()))



# =============================================================================
# Fiber Energy
# =============================================================================


class _FiberTerms:
    """Scaling-invariant pieces of u reused for every t."""

    def __init__(self, u: Field, params: KirchhoffParams, spec: PotentialSpec):
        self.params = params
        self.spec = spec
        self.G = grad_norm_sq(u)
        self.power = lp_norm_p(u, params.p)
        self.dim = u.grid.dim
        if not spec.vanishes:
            weight = np.abs(u.samples) ** params.q
            support = weight > 0
            self.weight = weight[support] * u.grid.cell_volume
            self.coords = [np.broadcast_to(x, u.grid.shape)[support] for x in u.grid.coordinates]

    def jacobian(self, t: float) -> float:
        q, n = self.params.q, self.dim
        return t ** (q * n / 2.0 - n)

    def h_integral(self, t: float) -> float:
        """int h(y / t) |u(y)|^q dy."""
        if self.spec.vanishes:
            return 0.0
        return float(np.sum(potential_values(self.spec, [x / t for x in self.coords]) * self.weight))

    def radial_integral(self, t: float) -> float:
        """int (x . grad h)(y / t) |u(y)|^q dy."""
        if self.spec.vanishes:
            return 0.0
        values = radial_derivative_values(self.spec, [x / t for x in self.coords])
        return float(np.sum(values * self.weight))

    def energy(self, t: float) -> float:
        pr = self.params
        pg = pr.p * pr.gamma_p
        value = 0.5 * pr.a * t**2 * self.G + 0.25 * pr.b * t**4 * self.G**2 - t**pg * self.power / pr.p
        if not self.spec.vanishes:
            value -= self.jacobian(t) * self.h_integral(t) / pr.q
        return value

    def pohozaev(self, t: float) -> float:
        pr = self.params
        pg = pr.p * pr.gamma_p
        value = pr.a * t**2 * self.G + pr.b * t**4 * self.G**2 - pr.gamma_p * t**pg * self.power
        if not self.spec.vanishes:
            value += self.jacobian(t) * (
                -pr.gamma_q * self.h_integral(t) + self.radial_integral(t) / pr.q
            )
        return value


def fiber_energies(
    u: Field, ts: Sequence[float], params: KirchhoffParams, spec: PotentialSpec
) -> np.ndarray:
    """
    I(t * u) for every t in ts without materializing t * u.

    The gradient and power terms scale as t^2 and t^{p gamma_p}; the
    perturbation uses x = y / t, giving t^{qN/2 - N} int h(y / t) |u(y)|^q dy
    with h evaluated exactly.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("fiber parameters must be positive")
    terms = _FiberTerms(u, params, spec)
    return np.array([terms.energy(float(t)) for t in ts])


def fiber_energy(u: Field, t: float, params: KirchhoffParams, spec: PotentialSpec) -> float:
    """I(t * u) with t * u = t^{N/2} u(t x)."""
    return float(fiber_energies(u, [t], params, spec)[0])


def fiber_pohozaev(
    u: Field, ts: Sequence[float], params: KirchhoffParams, spec: PotentialSpec
) -> np.ndarray:
    """P(t * u) = t d/dt I(t * u) for every t in ts."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    terms = _FiberTerms(u, params, spec)
    return np.array([terms.pohozaev(float(t)) for t in ts])


def _fiber_extremum(
    u: Field,
    params: KirchhoffParams,
    spec: PotentialSpec,
    bracket: Tuple[float, float],
    points: int,
    maximize: bool,
    warn: bool,
) -> Tuple[float, float]:
    terms = _FiberTerms(u, params, spec)
    sign = -1.0 if maximize else 1.0
    ts = np.geomspace(bracket[0], bracket[1], points)
    values = np.array([sign * terms.energy(float(t)) for t in ts])
    i = int(np.argmin(values))
    if i in (0, len(ts) - 1):
        if warn:
            logger.warning(
                "fiber extremum at the bracket end t=%.4g; widen the bracket", ts[i]
            )
        return float(ts[i]), float(sign * values[i])

    s = np.log(ts)
    result = optimize.minimize_scalar(
        lambda log_t: sign * terms.energy(float(np.exp(log_t))),
        bracket=(s[i - 1], s[i], s[i + 1]),
        method="golden",
    )
    t_star = float(np.exp(result.x))

    # P(t * u) changes sign at the extremum; polish the golden estimate on it
    lo, hi = t_star * (1.0 - 1e-6), t_star * (1.0 + 1e-6)
    p_lo, p_hi = terms.pohozaev(lo), terms.pohozaev(hi)
    if sign * p_lo < 0 < sign * p_hi:
        t_star = optimize.brentq(terms.pohozaev, lo, hi, xtol=1e-300, rtol=4e-16)
    return t_star, terms.energy(t_star)


def fiber_argmax(
    u: Field,
    params: KirchhoffParams,
    spec: PotentialSpec,
    bracket: Tuple[float, float] = FIBER_BRACKET,
    points: int = FIBER_SCAN_POINTS,
    warn: bool = True,
) -> Tuple[float, float]:
    """
    Maximizer of t -> I(t * u) on a bracket.

    A logarithmic scan picks the best sample, golden section refines it in
    log t and a root of P(t * u) polishes the result. Returns
    (t*, I(t* * u)); an endpoint is returned (with a warning) when the scan
    peaks there.
    """
    return _fiber_extremum(u, params, spec, bracket, points, True, warn)


def fiber_argmin(
    u: Field,
    params: KirchhoffParams,
    spec: PotentialSpec,
    bracket: Tuple[float, float] = FIBER_BRACKET,
    points: int = FIBER_SCAN_POINTS,
    warn: bool = True,
) -> Tuple[float, float]:
    """Minimizer of t -> I(t * u); the subcritical counterpart of fiber_argmax."""
    return _fiber_extremum(u, params, spec, bracket, points, False, warn)


def fiber_scan(
    u: Field, ts: Sequence[float], params: KirchhoffParams, spec: PotentialSpec
) -> List[Tuple[float, float]]:
    """Rows (t, I(t * u))."""
    ts = np.asarray(ts, dtype=float)
    return list(zip(ts.tolist(), fiber_energies(u, ts, params, spec).tolist()))


def energy_lower_bound(u: Field, profile: LandscapeProfile) -> float:
    """phi(|grad u|_2), a lower bound for I(u) on S_c when h >= 0."""
    return float(profile.phi(np.sqrt(grad_norm_sq(u))))
