"""
Physical constants of a run: a, b, the mass c and the exponents p, q.
"""

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from utils.errors import RegimeError

Regime = Literal["subcritical", "supercritical"]


def gamma_exponent(p: float, dim: int) -> float:
    """N (p - 2) / (2 p)."""
    return dim * (p - 2.0) / (2.0 * p)


class KirchhoffParams(BaseModel):
    """
    Constants of -(a + b |grad u|_2^2) Delta u + lambda u = |u|^{p-2} u + h |u|^{q-2} u.

    The band 2 + 4/N <= p <= 2 + 8/N is rejected with RegimeError.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    dim: int = Field(default=1, description="Spatial dimension N")
    a: float = Field(default=1.0, gt=0, description="Local diffusion coefficient")
    b: float = Field(default=1.0, gt=0, description="Nonlocal Kirchhoff coefficient")
    c: float = Field(default=1.0, gt=0, description="Prescribed mass")
    p: float = Field(default=3.0, description="Power exponent")
    q: float = Field(default=1.5, description="Perturbation exponent")

    @field_validator("dim")
    @classmethod
    def validate_dim(cls, v):
        if v not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {v}")
        return v

    @field_validator("q")
    @classmethod
    def validate_q(cls, v):
        if not 1.0 <= v < 2.0:
            raise ValueError(f"q must satisfy 1 <= q < 2, got {v}")
        return v

    @model_validator(mode="after")
    def validate_p(self):
        if not 2.0 < self.p < self.p_star:
            raise ValueError(
                f"p must satisfy 2 < p < {self.p_star} for N={self.dim}, got {self.p}"
            )
        lower, upper = self.p_mass_critical, self.p_bar
        if lower <= self.p <= upper:
            raise RegimeError(
                f"p={self.p} lies in the L2-critical band [{lower:.6g}, {upper:.6g}] "
                f"for N={self.dim}; only p < {lower:.6g} or p > {upper:.6g} are supported",
                {"field": "params.p"},
            )
        return self

    @property
    def gamma_p(self) -> float:
        return gamma_exponent(self.p, self.dim)

    @property
    def gamma_q(self) -> float:
        return gamma_exponent(self.q, self.dim)

    @property
    def p_bar(self) -> float:
        return 2.0 + 8.0 / self.dim

    @property
    def p_mass_critical(self) -> float:
        return 2.0 + 4.0 / self.dim

    @property
    def p_star(self) -> float:
        return 6.0 if self.dim == 3 else math.inf

    @property
    def regime(self) -> Regime:
        return "subcritical" if self.p < self.p_mass_critical else "supercritical"

    def with_mass(self, c: float) -> "KirchhoffParams":
        return KirchhoffParams(**{**self.model_dump(), "c": c})

    def describe(self) -> dict:
        return {**self.model_dump(), "gamma_p": self.gamma_p, "regime": self.regime}
