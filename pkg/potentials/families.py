"""
Analytic families for the perturbation h(x).

Each family is a fixed profile f scaled by the amplitude h0 and a sign:
h = +h0 f for sign "nonneg" and h = -h0 f for sign "nonpos" (then
hbar = -h = h0 f >= 0). The radial term x . grad h is evaluated from the
closed-form derivative of f, never by finite differences.
"""

from functools import lru_cache
from typing import Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fields.grid import Grid
from utils.errors import PotentialError

Family = Literal["zero", "gaussian", "rational_decay", "multibump"]
Sign = Literal["nonneg", "nonpos"]


class Bump(BaseModel):
    """Smooth compactly supported bump exp(1 - 1/(1 - |z|^2)), z = (x - center)/radius."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    center: Tuple[float, ...] = Field(description="Bump center, one entry per axis")
    radius: float = Field(gt=0, description="Support radius")
    height: float = Field(default=1.0, ge=0, description="Peak value before h0")


class PotentialSpec(BaseModel):
    """Immutable description of h(x)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Family = Field(default="zero", description="Analytic family of the profile")
    sign: Sign = Field(default="nonneg", description="nonneg: h >= 0; nonpos: h <= 0")
    h0: float = Field(default=0.0, ge=0.0, description="Amplitude h0")
    width: float = Field(default=1.0, description="Gaussian width w")
    decay_s: float = Field(default=1.0, description="Rational decay exponent s")
    bumps: Tuple[Bump, ...] = Field(default=(), description="Multibump components")

    @field_validator("width")
    @classmethod
    def validate_width(cls, v):
        if not v > 0:
            raise ValueError(f"width must be positive, got {v}")
        return v

    @field_validator("decay_s")
    @classmethod
    def validate_decay(cls, v):
        if not v > 0:
            raise ValueError(f"decay_s must be positive, got {v}")
        return v

    @model_validator(mode="after")
    def validate_bumps(self):
        if self.family == "multibump" and not self.bumps:
            raise ValueError("multibump family needs at least one bump")
        return self

    @property
    def sigma(self) -> float:
        return 1.0 if self.sign == "nonneg" else -1.0

    @property
    def vanishes(self) -> bool:
        return self.family == "zero" or self.h0 == 0.0

    @property
    def is_even(self) -> bool:
        """h(-x) = h(x) for every x."""
        if self.family != "multibump":
            return True
        centers = {tuple(b.center) for b in self.bumps}
        return all(
            tuple(-c for c in b.center) in centers for b in self.bumps
        ) and len({(b.radius, b.height) for b in self.bumps}) == 1

    def with_amplitude(self, h0: float) -> "PotentialSpec":
        return self.model_copy(update={"h0": float(h0)})

    def check_integrable(self, dim: int, q: float) -> None:
        """
        Hard guard for rational decay: h must lie in L^{2/(2-q)}.

        Raises:
            PotentialError: If decay_s <= N (2 - q) / 4
        """
        if self.family != "rational_decay":
            return
        bound = dim * (2.0 - q) / 4.0
        if not self.decay_s > bound:
            raise PotentialError(
                f"rational_decay with decay_s={self.decay_s} is not in L^(2/(2-q)) "
                f"for N={dim}, q={q}: need decay_s > {bound}",
                {"field": "potential.decay_s"},
            )


# =============================================================================
# Pointwise Evaluation
# =============================================================================


def _radius_sq(coords: Sequence[np.ndarray]) -> np.ndarray:
    r2 = 0.0
    for x in coords:
        r2 = r2 + np.asarray(x, dtype=float) ** 2
    return np.asarray(r2)


def _bump_terms(spec: PotentialSpec, coords: Sequence[np.ndarray]):
    """Per-point profile value and x . grad profile for the multibump family."""
    value = 0.0
    radial = 0.0
    for bump in spec.bumps:
        if len(bump.center) != len(coords):
            raise ValueError(
                f"bump center {bump.center} does not match dimension {len(coords)}"
            )
        z = [(np.asarray(x, dtype=float) - c) / bump.radius for x, c in zip(coords, bump.center)]
        z2 = _radius_sq(z)
        inside = z2 < 1.0
        gap = np.where(inside, 1.0 - z2, 1.0)
        phi = np.where(inside, np.exp(1.0 - 1.0 / gap), 0.0)
        z_dot_x = 0.0
        for zi, x in zip(z, coords):
            z_dot_x = z_dot_x + zi * np.asarray(x, dtype=float)
        value = value + bump.height * phi
        radial = radial + bump.height * phi * (-2.0 * z_dot_x / (bump.radius * gap**2))
    return value, radial


def potential_values(spec: PotentialSpec, coords: Sequence[np.ndarray]) -> np.ndarray:
    """Signed h on broadcastable coordinate arrays."""
    r2 = _radius_sq(coords)
    if spec.vanishes:
        return np.zeros_like(r2)
    if spec.family == "gaussian":
        profile = np.exp(-r2 / spec.width**2)
    elif spec.family == "rational_decay":
        profile = (1.0 + r2) ** (-spec.decay_s)
    else:
        profile, _ = _bump_terms(spec, coords)
    return spec.sigma * spec.h0 * profile


def radial_derivative_values(
    spec: PotentialSpec, coords: Sequence[np.ndarray]
) -> np.ndarray:
    """Signed x . grad h on broadcastable coordinate arrays."""
    r2 = _radius_sq(coords)
    if spec.vanishes:
        return np.zeros_like(r2)
    if spec.family == "gaussian":
        radial = -2.0 * r2 / spec.width**2 * np.exp(-r2 / spec.width**2)
    elif spec.family == "rational_decay":
        radial = -2.0 * spec.decay_s * r2 / (1.0 + r2) * (1.0 + r2) ** (-spec.decay_s)
    else:
        _, radial = _bump_terms(spec, coords)
    return spec.sigma * spec.h0 * radial


def eval_potential(spec: PotentialSpec, x: Sequence[float]) -> float:
    """
    Signed value of h at a point.

    Args:
        spec: Potential description
        x: Point in R^N

    Returns:
        h(x); nonpos families return values <= 0
    """
    return float(potential_values(spec, [np.asarray(xi, dtype=float) for xi in x]))


def eval_radial_derivative(spec: PotentialSpec, x: Sequence[float]) -> float:
    """Closed-form x . grad h at a point."""
    return float(
        radial_derivative_values(spec, [np.asarray(xi, dtype=float) for xi in x])
    )


@lru_cache(maxsize=64)
def potential_on_grid(spec: PotentialSpec, grid: Grid) -> np.ndarray:
    values = np.broadcast_to(potential_values(spec, grid.coordinates), grid.shape).copy()
    values.setflags(write=False)
    return values


@lru_cache(maxsize=64)
def radial_derivative_on_grid(spec: PotentialSpec, grid: Grid) -> np.ndarray:
    values = np.broadcast_to(
        radial_derivative_values(spec, grid.coordinates), grid.shape
    ).copy()
    values.setflags(write=False)
    return values
