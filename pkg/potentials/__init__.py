"""Analytic perturbation families h(x) and their norms.

Assumption checks live in potentials.assumptions; import them from there.
"""

from .families import Bump, PotentialSpec, eval_potential, eval_radial_derivative
from .norms import PotentialNorms, potential_norms, quadrature_norms

__all__ = [
    "Bump",
    "PotentialSpec",
    "eval_potential",
    "eval_radial_derivative",
    "PotentialNorms",
    "potential_norms",
    "quadrature_norms",
]
