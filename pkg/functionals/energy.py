"""
Energies and identities of the Kirchhoff functional on a grid.

    I(u)   = a/2 G + b/4 G^2 - 1/p int |u|^p - 1/q int h |u|^q,   G = |grad u|_2^2
    I_oo   = I with h = 0
    P(u)   = a G + b G^2 - gamma_p int |u|^p - gamma_q int h |u|^q
             + 1/q int (x . grad h) |u|^q

h is signed, so one formula covers h >= 0 and h = -hbar <= 0.
"""

from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField

from fields.field import Field, grad_norm_sq, inner, laplacian_array, lp_norm_p, mass
from functionals.params import KirchhoffParams
from potentials.families import PotentialSpec, potential_on_grid, radial_derivative_on_grid
from utils.errors import ZeroFieldError

ZERO_POTENTIAL = PotentialSpec()


class EnergyBreakdown(BaseModel):
    """The four terms of I(u); total = kinetic + nonlocal - power - perturbation."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kinetic: float
    nonlocal_term: float = PydanticField(alias="nonlocal")
    power: float
    perturbation: float
    total: float

    def to_dict(self) -> Dict[str, float]:
        return self.model_dump(by_alias=True)


def perturbation_integral(u: Field, spec: PotentialSpec, q: float) -> float:
    """int h |u|^q dx."""
    if spec.vanishes:
        return 0.0
    h = potential_on_grid(spec, u.grid)
    return float(np.sum(h * np.abs(u.samples) ** q) * u.grid.cell_volume)


def radial_integral(u: Field, spec: PotentialSpec, q: float) -> float:
    """int (x . grad h) |u|^q dx."""
    if spec.vanishes:
        return 0.0
    radial = radial_derivative_on_grid(spec, u.grid)
    return float(np.sum(radial * np.abs(u.samples) ** q) * u.grid.cell_volume)


def energy(u: Field, params: KirchhoffParams, spec: PotentialSpec) -> EnergyBreakdown:
    """
    Evaluate I(u) term by term.

    Args:
        u: Field on the grid
        params: Kirchhoff constants
        spec: Perturbation h

    Returns:
        EnergyBreakdown with every term as a nonnegative magnitude except
        perturbation, which carries the sign of h
    """
    G = grad_norm_sq(u)
    kinetic = 0.5 * params.a * G
    nonlocal_term = 0.25 * params.b * G**2
    power = lp_norm_p(u, params.p) / params.p
    perturbation = perturbation_integral(u, spec, params.q) / params.q
    return EnergyBreakdown(
        kinetic=kinetic,
        nonlocal_term=nonlocal_term,
        power=power,
        perturbation=perturbation,
        total=kinetic + nonlocal_term - power - perturbation,
    )


def energy_limit(u: Field, params: KirchhoffParams) -> float:
    """I_oo(u), the energy with h = 0."""
    return energy(u, params, ZERO_POTENTIAL).total


def energy_lambda(
    u: Field, params: KirchhoffParams, spec: PotentialSpec, lam: float
) -> float:
    """I_lambda(u) = I(u) + lambda/2 int u^2."""
    return energy(u, params, spec).total + 0.5 * lam * mass(u)


def energy_limit_lambda(u: Field, params: KirchhoffParams, lam: float) -> float:
    return energy_limit(u, params) + 0.5 * lam * mass(u)


def j_functional(
    u: Field, params: KirchhoffParams, spec: PotentialSpec, lam: float, a_sq: float
) -> float:
    """
    Functional with the nonlocal coefficient frozen at A^2.

    (a/2 + b A^2 / 4) G + lambda/2 int u^2 - 1/p int |u|^p - 1/q int h |u|^q;
    equals energy_lambda when A^2 = G.
    """
    G = grad_norm_sq(u)
    return (
        (0.5 * params.a + 0.25 * params.b * a_sq) * G
        + 0.5 * lam * mass(u)
        - lp_norm_p(u, params.p) / params.p
        - perturbation_integral(u, spec, params.q) / params.q
    )


def j_limit(u: Field, params: KirchhoffParams, lam: float, a_sq: float) -> float:
    return j_functional(u, params, ZERO_POTENTIAL, lam, a_sq)


def pohozaev(u: Field, params: KirchhoffParams, spec: PotentialSpec) -> float:
    """P(u) = t d/dt I(t * u) at t = 1."""
    G = grad_norm_sq(u)
    q = params.q
    return (
        params.a * G
        + params.b * G**2
        - params.gamma_p * lp_norm_p(u, params.p)
        - params.gamma_q * perturbation_integral(u, spec, q)
        + radial_integral(u, spec, q) / q
    )


def pohozaev_scale(u: Field, params: KirchhoffParams, spec: PotentialSpec) -> float:
    """Sum of the magnitudes of the terms of P; the reference for relative checks."""
    G = grad_norm_sq(u)
    q = params.q
    return (
        params.a * G
        + params.b * G**2
        + params.gamma_p * lp_norm_p(u, params.p)
        + abs(params.gamma_q * perturbation_integral(u, spec, q))
        + abs(radial_integral(u, spec, q)) / q
    )


# =============================================================================
# Gradients and Multipliers
# =============================================================================


def nonlinearity(u: Field, params: KirchhoffParams, spec: PotentialSpec) -> np.ndarray:
    """|u|^{p-2} u + h |u|^{q-2} u with |u|^{q-2} u := sign(u) |u|^{q-1}."""
    s = u.samples
    out = np.abs(s) ** (params.p - 2.0) * s
    if not spec.vanishes:
        h = potential_on_grid(spec, u.grid)
        out = out + h * np.sign(s) * np.abs(s) ** (params.q - 1.0)
    return out


def free_gradient(u: Field, params: KirchhoffParams, spec: PotentialSpec) -> np.ndarray:
    """L2 gradient of I: -(a + b G) Delta u - |u|^{p-2} u - h |u|^{q-2} u."""
    G = grad_norm_sq(u)
    return -(params.a + params.b * G) * laplacian_array(u.grid, u.samples) - nonlinearity(
        u, params, spec
    )


def multiplier(u: Field, params: KirchhoffParams, spec: PotentialSpec) -> float:
    """
    Lagrange multiplier from testing the equation with u.

    Returns:
        (-a G - b G^2 + int |u|^p + int h |u|^q) / mass(u)

    Raises:
        ZeroFieldError: If u is the zero field
    """
    m = mass(u)
    if m == 0:
        raise ZeroFieldError("zero-field: the multiplier is undefined for u = 0")
    G = grad_norm_sq(u)
    return (
        -params.a * G
        - params.b * G**2
        + lp_norm_p(u, params.p)
        + perturbation_integral(u, spec, params.q)
    ) / m


def el_residual(
    u: Field, params: KirchhoffParams, spec: PotentialSpec, lam: float
) -> float:
    """L2 norm of -(a + b G) Delta u + lambda u - |u|^{p-2} u - h |u|^{q-2} u."""
    residual = free_gradient(u, params, spec) + lam * u.samples
    return float(np.sqrt(np.sum(residual**2) * u.grid.cell_volume))


def constrained_gradient(u: Field, params: KirchhoffParams, spec: PotentialSpec) -> Field:
    """
    Tangential gradient g = grad I(u) + lambda u on S_c.

    lambda is chosen so that int g u dx = 0 to rounding.

    Raises:
        ZeroFieldError: If u is the zero field
    """
    m = mass(u)
    if m == 0:
        raise ZeroFieldError("zero-field: the constrained gradient is undefined for u = 0")
    grad = u.with_samples(free_gradient(u, params, spec))
    lam = -inner(grad, u) / m
    return u.with_samples(grad.samples + lam * u.samples)
