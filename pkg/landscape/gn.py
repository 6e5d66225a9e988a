"""
Best Gagliardo-Nirenberg constant C_{N,p}.

    |u|_p <= C_{N,p} |grad u|_2^{gamma_p} |u|_2^{1 - gamma_p}

The maximizer of the Weinstein quotient is the ground state of
-Delta w + omega w = w^{p-1}; it is computed by spectral renormalization
(a normalized fixed-point ascent) from a Gaussian start and the quotient is
evaluated on the converged profile.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from fields.field import Field, grad_norm_sq, l2_norm_array, lp_norm_p, mass
from fields.grid import Grid
from functionals.params import gamma_exponent
from utils.defaults import GN_DECAY_FACTOR, GN_MAX_ITERATIONS, GN_TOL
from utils.errors import ConvergenceError, ZeroFieldError

logger = logging.getLogger(__name__)


def gamma(p: float, dim: int) -> float:
    """gamma_p = N (p - 2) / (2 p)."""
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    return gamma_exponent(p, dim)


def weinstein_quotient(u: Field, p: float) -> float:
    """|u|_p / (|grad u|_2^{gamma_p} |u|_2^{1 - gamma_p})."""
    m = mass(u)
    if m == 0:
        raise ZeroFieldError("zero-field: the Weinstein quotient is undefined for u = 0")
    G = grad_norm_sq(u)
    if G == 0:
        raise ValueError("the Weinstein quotient is unbounded for constant fields")
    g = gamma(p, u.grid.dim)
    return lp_norm_p(u, p) ** (1.0 / p) / (G ** (g / 2.0) * m ** ((1.0 - g) / 2.0))


@dataclass(frozen=True)
class GNOptimizer:
    """Converged maximizer of the Weinstein quotient."""

    constant: float
    profile: Field
    omega: float
    iterations: int


def soliton_frequency(grid: Grid, p: float) -> float:
    """
    omega for the ground state on this box.

    The tail e^{-sqrt(omega) |x|} must vanish inside the box while the core,
    of width about 1 / ((p - 2) sqrt(omega)), stays resolved.
    """
    decay = min(GN_DECAY_FACTOR, 0.5 * math.pi * math.sqrt(grid.points_per_dim / (p - 2.0)))
    return (decay / grid.half_width) ** 2


def gn_optimizer(
    dim: int,
    p: float,
    grid: Grid,
    max_iterations: int = GN_MAX_ITERATIONS,
    tol: float = GN_TOL,
) -> GNOptimizer:
    """
    Ground state of -Delta w + omega w = w^{p-1} and its Weinstein quotient.

    Args:
        dim: Spatial dimension, must match grid.dim
        p: Exponent with 2 < p < 2*
        grid: Grid the profile lives on
        max_iterations: Cap on renormalization sweeps
        tol: Relative L2 change that counts as converged

    Returns:
        GNOptimizer with the constant and the profile

    Raises:
        ConvergenceError: If the iteration does not settle, with the last quotient
    """
    if grid.dim != dim:
        raise ValueError(f"grid dimension {grid.dim} does not match dim={dim}")
    if dim == 3 and p >= 6.0:
        raise ValueError(f"p must be below 6 in N=3, got {p}")
    gamma(p, dim)

    omega = soliton_frequency(grid, p)
    symbol = grid.k_squared + omega
    exponent = (p - 1.0) / (p - 2.0)
    w = omega ** (1.0 / (p - 2.0)) * np.exp(-0.5 * omega * grid.radius_sq)

    for iteration in range(1, max_iterations + 1):
        w_hat = sfft.fftn(w)
        n_hat = sfft.fftn(np.abs(w) ** (p - 2.0) * w)
        numerator = float(np.sum(symbol * np.abs(w_hat) ** 2))
        denominator = float(np.sum(np.real(np.conj(w_hat) * n_hat)))
        if denominator <= 0:
            raise ConvergenceError(
                "gn-not-converged: renormalization lost positivity",
                {"iterations": iteration},
            )
        factor = numerator / denominator
        w_next = sfft.ifftn(factor**exponent * n_hat / symbol).real
        change = l2_norm_array(grid, w_next - w) / l2_norm_array(grid, w_next)
        w = w_next
        if change < tol:
            break
    else:
        last = weinstein_quotient(Field(grid, w), p)
        raise ConvergenceError(
            f"gn-not-converged after {max_iterations} iterations (last change {change:.3e})",
            {"iterations": max_iterations, "last_constant": last},
        )

    profile = Field(grid, w)
    constant = weinstein_quotient(profile, p)
    logger.info(
        "C_{%d,%.4g} = %.12g after %d renormalization sweeps (omega=%.4g)",
        dim,
        p,
        constant,
        iteration,
        omega,
    )
    return GNOptimizer(constant=constant, profile=profile, omega=omega, iterations=iteration)


def gn_constant(dim: int, p: float, grid: Grid) -> float:
    """Best constant C_{N,p} on this grid."""
    return gn_optimizer(dim, p, grid).constant
