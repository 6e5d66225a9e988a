"""
Barycenter of a field.

    nu(u)(x) = average of |u| over the unit ball around x
    uhat     = [nu(u) - max nu(u) / 2]^+
    beta(u)  = int uhat x / int uhat
"""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import signal

from fields.field import Field
from fields.grid import Grid
from utils.errors import ZeroFieldError


@lru_cache(maxsize=16)
def _unit_ball_kernel(grid: Grid) -> np.ndarray:
    """Normalized indicator of B_1(0) on an odd stencil of the grid spacing."""
    half = int(np.ceil(1.0 / grid.spacing))
    offsets = grid.spacing * np.arange(-half, half + 1)
    mesh = np.meshgrid(*([offsets] * grid.dim), indexing="ij")
    inside = sum(x**2 for x in mesh) <= 1.0
    kernel = inside.astype(float)
    kernel /= kernel.sum()
    kernel.setflags(write=False)
    return kernel


def ball_average(u: Field) -> np.ndarray:
    """nu(u) on the grid; the box is padded with zeros, not wrapped."""
    return signal.fftconvolve(np.abs(u.samples), _unit_ball_kernel(u.grid), mode="same")


def barycenter(u: Field) -> Tuple[float, ...]:
    """
    beta(u) as a point of R^N.

    Raises:
        ZeroFieldError: If u is the zero field
    """
    if u.is_zero():
        raise ZeroFieldError("zero-field: the barycenter is undefined for u = 0")
    nu = ball_average(u)
    hat = np.maximum(nu - 0.5 * np.max(nu), 0.0)
    total = float(np.sum(hat))
    return tuple(
        float(np.sum(hat * np.broadcast_to(x, u.grid.shape)) / total)
        for x in u.grid.coordinates
    )
