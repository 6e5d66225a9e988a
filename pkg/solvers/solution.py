"""
Result types shared by every solver.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np

from fields.field import Field, boundary_fraction, grad_norm_sq, mass
from functionals.energy import (
    EnergyBreakdown,
    el_residual,
    energy,
    multiplier,
    pohozaev,
)
from functionals.params import KirchhoffParams
from potentials.families import PotentialSpec
from utils.defaults import DECAY_TOL, MASS_TOL, RESIDUAL_TOL

LevelTag = Literal["global_min", "limit_ground_state", "mountain_pass", "linking_candidate"]


@dataclass(frozen=True)
class Solution:
    """A normalized critical point (u, lambda) with its diagnostics."""

    field: Field
    lam: float
    energy: EnergyBreakdown
    pohozaev_residual: float
    el_residual: float
    level_tag: LevelTag
    iterations: int
    converged: bool
    failure: Optional[str] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def level(self) -> float:
        return self.energy.total

    @property
    def min_sample_ratio(self) -> float:
        """min u / max u; near 0 or positive for sign-definite solutions."""
        peak = float(np.max(self.field.samples))
        return float(np.min(self.field.samples)) / peak if peak > 0 else -np.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "energy": self.energy.to_dict(),
            "level": self.level,
            "pohozaev_residual": self.pohozaev_residual,
            "el_residual": self.el_residual,
            "level_tag": self.level_tag,
            "iterations": self.iterations,
            "converged": self.converged,
            "failure": self.failure,
            "mass": mass(self.field),
            "extras": self.extras,
        }

    def sidecar(
        self, params: KirchhoffParams, spec: PotentialSpec, seed: Optional[int] = None
    ) -> Dict[str, Any]:
        """JSON sidecar written next to the KFLD file."""
        return {
            **self.to_dict(),
            "params": params.describe(),
            "potential": spec.model_dump(),
            "grid": self.field.grid.describe(),
            "seed": seed,
        }


@dataclass(frozen=True)
class LevelBracket:
    """Linking level estimates over the lattice on Q = B_R x [s1, s2]."""

    m_c: float
    interior_max: float
    boundary_max: float
    upper_bound_L: float
    certified: bool
    epsilon: float
    argmax: Tuple[Tuple[float, ...], float]
    boundary_argmax: Tuple[Tuple[float, ...], float]
    boundary_perturbation_max: float
    violations: List[Dict[str, Any]] = field(default_factory=list)
    lattice: List[Tuple[float, ...]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m_c": self.m_c,
            "interior_max": self.interior_max,
            "boundary_max": self.boundary_max,
            "upper_bound_L": self.upper_bound_L,
            "certified": self.certified,
            "epsilon": self.epsilon,
            "argmax": {"y": list(self.argmax[0]), "s": self.argmax[1]},
            "boundary_argmax": {"y": list(self.boundary_argmax[0]), "s": self.boundary_argmax[1]},
            "boundary_perturbation_max": self.boundary_perturbation_max,
            "violations": self.violations,
        }


def residual_target(u: Field, params: KirchhoffParams, tol: float = RESIDUAL_TOL) -> float:
    """Absolute residual that counts as converged: tol * a * |grad u|_2^2."""
    return tol * params.a * grad_norm_sq(u)


def build_solution(
    u: Field,
    params: KirchhoffParams,
    spec: PotentialSpec,
    level_tag: LevelTag,
    iterations: int,
    *,
    tol: float = RESIDUAL_TOL,
    failure: Optional[str] = None,
    extras: Optional[Dict[str, Any]] = None,
) -> Solution:
    """
    Evaluate every diagnostic of u and decide convergence.

    Converged means no recorded failure, el_residual <= tol * a * G,
    mass within MASS_TOL of c and a boundary layer below DECAY_TOL.
    """
    lam = multiplier(u, params, spec)
    breakdown = energy(u, params, spec)
    G = grad_norm_sq(u)
    scale = params.a * G + params.b * G**2
    pohozaev_residual = abs(pohozaev(u, params, spec)) / scale if scale > 0 else np.inf
    residual = el_residual(u, params, spec, lam)

    if failure is None and boundary_fraction(u) > DECAY_TOL:
        failure = "escape: the field does not decay inside the box"
    converged = (
        failure is None
        and residual <= residual_target(u, params, tol)
        and u.is_on_sphere(params.c, MASS_TOL)
    )
    return Solution(
        field=u,
        lam=lam,
        energy=breakdown,
        pohozaev_residual=pohozaev_residual,
        el_residual=residual,
        level_tag=level_tag,
        iterations=iterations,
        converged=converged,
        failure=failure,
        extras=dict(extras or {}),
    )
