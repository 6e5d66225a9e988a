"""Energies, identities and multipliers of the Kirchhoff functional."""

from .params import KirchhoffParams, gamma_exponent
from .energy import (
    EnergyBreakdown,
    energy,
    energy_limit,
    energy_lambda,
    energy_limit_lambda,
    j_functional,
    j_limit,
    pohozaev,
    el_residual,
    multiplier,
    constrained_gradient,
    nonlinearity,
)

__all__ = [
    "KirchhoffParams",
    "gamma_exponent",
    "EnergyBreakdown",
    "energy",
    "energy_limit",
    "energy_lambda",
    "energy_limit_lambda",
    "j_functional",
    "j_limit",
    "pohozaev",
    "el_residual",
    "multiplier",
    "constrained_gradient",
    "nonlinearity",
]
