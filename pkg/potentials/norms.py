"""
Integral norms of h used by the assumption checks and the thresholds.

Closed forms are the source of truth for the gaussian and rational_decay
families; grid quadrature handles multibump and serves as the cross-check
for the others.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import special

from fields.grid import Grid
from potentials.families import PotentialSpec, potential_on_grid, radial_derivative_on_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PotentialNorms:
    """Norms of h; upsilon is None when |x . grad hbar| / hbar is unbounded."""

    norm_2_over_2mq: float
    norm_p_over_pmq: float
    norm_radial: float
    upsilon: Optional[float]
    source: str = "closed_form"

    def to_dict(self) -> dict:
        return asdict(self)


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in R^dim (2 points for dim = 1)."""
    return 2.0 * math.pi ** (dim / 2.0) / special.gamma(dim / 2.0)


def _gaussian_norm(spec: PotentialSpec, dim: int, r: float) -> float:
    return spec.h0 * (math.pi * spec.width**2 / r) ** (dim / (2.0 * r))


def _gaussian_radial_norm(spec: PotentialSpec, dim: int, r: float) -> float:
    alpha = r / spec.width**2
    moment = sphere_area(dim) * special.gamma(r + dim / 2.0) / (2.0 * alpha ** (r + dim / 2.0))
    return spec.h0 * (2.0 / spec.width**2) * moment ** (1.0 / r)


def _rational_norm(spec: PotentialSpec, dim: int, r: float) -> float:
    tail = spec.decay_s * r - dim / 2.0
    if tail <= 0:
        return math.inf
    integral = sphere_area(dim) * special.beta(dim / 2.0, tail) / 2.0
    return spec.h0 * integral ** (1.0 / r)


def _rational_radial_norm(spec: PotentialSpec, dim: int, r: float) -> float:
    tail = spec.decay_s * r - dim / 2.0
    if tail <= 0:
        return math.inf
    integral = (
        (2.0 * spec.decay_s) ** r * sphere_area(dim) * special.beta(r + dim / 2.0, tail) / 2.0
    )
    return spec.h0 * integral ** (1.0 / r)


def upsilon_bound(spec: PotentialSpec) -> Optional[float]:
    """Best constant in |x . grad hbar| <= upsilon * hbar, when finite."""
    if spec.vanishes:
        return 0.0
    if spec.family == "rational_decay":
        return 2.0 * spec.decay_s
    return None


def _check_exponents(q: float, p: float) -> None:
    if not (1.0 <= q < 2.0 < p):
        raise ValueError(f"norms need 1 <= q < 2 < p, got q={q}, p={p}")


def quadrature_norms(spec: PotentialSpec, q: float, p: float, grid: Grid) -> PotentialNorms:
    """Trapezoidal quadrature of every norm on the grid."""
    _check_exponents(q, p)
    h = np.abs(potential_on_grid(spec, grid))
    radial = np.abs(radial_derivative_on_grid(spec, grid))
    dv = grid.cell_volume

    def lr(values: np.ndarray, r: float) -> float:
        return float((np.sum(values**r) * dv) ** (1.0 / r))

    r = 2.0 / (2.0 - q)
    return PotentialNorms(
        norm_2_over_2mq=lr(h, r),
        norm_p_over_pmq=lr(h, p / (p - q)),
        norm_radial=lr(radial, r),
        upsilon=upsilon_bound(spec),
        source="quadrature",
    )


def potential_norms(spec: PotentialSpec, q: float, p: float, grid: Grid) -> PotentialNorms:
    """
    Norms ||h||_{2/(2-q)}, ||h||_{p/(p-q)}, ||x . grad h||_{2/(2-q)} and upsilon.

    Args:
        spec: Potential description
        q: Sublinear exponent, 1 <= q < 2
        p: Power exponent, p > 2
        grid: Grid used for quadrature (multibump) and for the dimension

    Returns:
        PotentialNorms, closed form where the family admits one

    Raises:
        PotentialError: If h is not in L^{2/(2-q)}
    """
    _check_exponents(q, p)
    dim = grid.dim
    spec.check_integrable(dim, q)

    if spec.vanishes:
        return PotentialNorms(0.0, 0.0, 0.0, 0.0)
    if spec.family == "multibump":
        return quadrature_norms(spec, q, p, grid)

    r = 2.0 / (2.0 - q)
    rp = p / (p - q)
    if spec.family == "gaussian":
        norms = PotentialNorms(
            norm_2_over_2mq=_gaussian_norm(spec, dim, r),
            norm_p_over_pmq=_gaussian_norm(spec, dim, rp),
            norm_radial=_gaussian_radial_norm(spec, dim, r),
            upsilon=None,
        )
    else:
        norms = PotentialNorms(
            norm_2_over_2mq=_rational_norm(spec, dim, r),
            norm_p_over_pmq=_rational_norm(spec, dim, rp),
            norm_radial=_rational_radial_norm(spec, dim, r),
            upsilon=upsilon_bound(spec),
        )
    if math.isinf(norms.norm_p_over_pmq):
        logger.warning(
            "h is not in L^%.4g for decay_s=%.4g in N=%d; ||h||_{p/(p-q)} is infinite",
            rp,
            spec.decay_s,
            dim,
        )
    return norms
