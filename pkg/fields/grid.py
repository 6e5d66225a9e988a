"""
Truncated-box discretization of R^N.

The box [-L, L)^N is sampled on M points per axis with uniform spacing 2L/M
and periodic wrap, which is what the spectral operators in fields.field
assume.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple

import numpy as np
from scipy import fft as sfft

from utils.defaults import (
    DEFAULT_INTERPOLATION,
    INTERPOLATION_MODES,
    MAX_GRID_POINTS,
    MIN_POINTS_PER_DIM,
)
from utils.errors import GridError


@dataclass(frozen=True)
class Grid:
    """
    Uniform periodic grid on [-half_width, half_width)^dim.

    interpolation selects how scale_fiber and translate resample fields
    living on the grid.
    """

    dim: int
    half_width: float
    points_per_dim: int
    interpolation: str = DEFAULT_INTERPOLATION

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_dim

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points_per_dim,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_dim**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        """Sample positions along one axis."""
        return -self.half_width + self.spacing * np.arange(self.points_per_dim)

    @cached_property
    def coordinates(self) -> List[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis (ij indexing)."""
        return _broadcast_axes(self.axis, self.dim)

    @cached_property
    def radius_sq(self) -> np.ndarray:
        """|x|^2 on the full grid."""
        r2 = np.zeros(self.shape)
        for x in self.coordinates:
            r2 = r2 + x**2
        return r2

    @cached_property
    def wavenumbers(self) -> List[np.ndarray]:
        """Broadcastable angular wavenumbers, one per axis."""
        k = 2.0 * np.pi * sfft.fftfreq(self.points_per_dim, d=self.spacing)
        return _broadcast_axes(k, self.dim)

    @cached_property
    def k_squared(self) -> np.ndarray:
        """|k|^2 on the full spectral grid."""
        k2 = np.zeros(self.shape)
        for k in self.wavenumbers:
            k2 = k2 + k**2
        return k2

    @property
    def k_max(self) -> float:
        return np.pi / self.spacing

    def points(self) -> np.ndarray:
        """All grid points as an (M^dim, dim) array in row-major order."""
        mesh = np.meshgrid(*([self.axis] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def reflect(self, samples: np.ndarray) -> np.ndarray:
        """Samples of x -> u(-x); exact on the grid since x_j -> x_{-j mod M}."""
        out = samples
        for ax in range(self.dim):
            out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
        return out

    def describe(self) -> dict:
        return {
            "dim": self.dim,
            "half_width": self.half_width,
            "points_per_dim": self.points_per_dim,
            "spacing": self.spacing,
            "interpolation": self.interpolation,
        }


def _broadcast_axes(values: np.ndarray, dim: int) -> List[np.ndarray]:
    arrays = []
    for ax in range(dim):
        shape = [1] * dim
        shape[ax] = values.size
        arrays.append(values.reshape(shape))
    return arrays


def make_grid(
    dim: int,
    half_width: float,
    points_per_dim: int,
    max_points: int = MAX_GRID_POINTS,
    interpolation: str = DEFAULT_INTERPOLATION,
) -> Grid:
    """
    Build a validated grid.

    Args:
        dim: Spatial dimension, one of 1, 2, 3
        half_width: Box half width L > 0
        points_per_dim: Even number of points per axis, at least 16
        max_points: Memory budget for M^dim
        interpolation: "spectral" or "linear" resampling for fields on the grid

    Returns:
        Grid with spacing 2L/M

    Raises:
        GridError: On any out-of-range argument
    """
    if dim not in (1, 2, 3):
        raise GridError(
            f"dim-out-of-range: dim must be 1, 2 or 3, got {dim}", {"field": "dim"}
        )
    if not half_width > 0:
        raise GridError(
            f"half_width must be positive, got {half_width}", {"field": "half_width"}
        )
    if points_per_dim < MIN_POINTS_PER_DIM or points_per_dim % 2:
        raise GridError(
            f"points_per_dim must be even and >= {MIN_POINTS_PER_DIM}, got {points_per_dim}",
            {"field": "points_per_dim"},
        )
    if points_per_dim**dim > max_points:
        raise GridError(
            f"grid of {points_per_dim}^{dim} points exceeds the memory budget of {max_points}",
            {"field": "points_per_dim"},
        )
    if interpolation not in INTERPOLATION_MODES:
        raise GridError(
            f"interpolation must be one of {INTERPOLATION_MODES}, got {interpolation!r}",
            {"field": "interpolation"},
        )
    return Grid(
        dim=dim,
        half_width=float(half_width),
        points_per_dim=int(points_per_dim),
        interpolation=interpolation,
    )
