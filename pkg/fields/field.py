"""
Fields on a Grid and the operations every solver is built from.

A Field is an immutable array of real samples. Norms use trapezoidal
quadrature (spectrally accurate for periodic decaying functions) and
derivatives use the FFT on the periodic box. The two group actions of the
problem, the mass-preserving dilation t*u = t^{N/2} u(t x) and translation,
resample by trigonometric interpolation (or linear interpolation when the
grid is configured for it) and treat everything outside the box as zero.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy import ndimage, signal

from fields.grid import Grid
from utils.defaults import INTERPOLATION_MODES, MASS_TOL
from utils.errors import ZeroFieldError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of u on a grid, row-major, read-only after construction."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64)
        if arr.shape != self.grid.shape:
            if arr.size != self.grid.size:
                raise ValueError(
                    f"expected {self.grid.size} samples for grid {self.grid.shape}, got {arr.size}"
                )
            arr = arr.reshape(self.grid.shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("field samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def flat(self) -> np.ndarray:
        return self.samples.ravel()

    def with_samples(self, samples: np.ndarray) -> "Field":
        return Field(self.grid, samples)

    def is_on_sphere(self, c: float, mass_tol: float = MASS_TOL) -> bool:
        """Check |mass(u) - c| <= mass_tol * c."""
        return abs(mass(self) - c) <= mass_tol * c

    def is_zero(self) -> bool:
        return not np.any(self.samples)


def zeros(grid: Grid) -> Field:
    return Field(grid, np.zeros(grid.shape))


def from_function(grid: Grid, func) -> Field:
    """Sample func(*coordinates) on the grid."""
    values = np.broadcast_to(func(*grid.coordinates), grid.shape)
    return Field(grid, values)


# =============================================================================
# Quadrature and Norms
# =============================================================================


def inner(u: Field, v: Field) -> float:
    return float(np.sum(u.samples * v.samples) * u.grid.cell_volume)


def mass(u: Field) -> float:
    """Quadrature of the integral of |u|^2."""
    return float(np.sum(u.samples**2) * u.grid.cell_volume)


def l2_norm_array(grid: Grid, values: np.ndarray) -> float:
    return float(np.sqrt(np.sum(values**2) * grid.cell_volume))


def grad_norm_sq(u: Field) -> float:
    """Integral of |grad u|^2 by Parseval on the periodic box."""
    grid = u.grid
    coeffs = sfft.fftn(u.samples)
    total = np.sum(grid.k_squared * np.abs(coeffs) ** 2)
    return float(total * grid.cell_volume / grid.size)


def lp_norm_p(u: Field, p: float) -> float:
    """Integral of |u|^p (the p-th power, not the norm)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return float(np.sum(np.abs(u.samples) ** p) * u.grid.cell_volume)


def laplacian_array(grid: Grid, samples: np.ndarray) -> np.ndarray:
    coeffs = sfft.fftn(samples)
    return sfft.ifftn(-grid.k_squared * coeffs).real


def laplacian(u: Field) -> Field:
    """Spectral Laplacian."""
    return u.with_samples(laplacian_array(u.grid, u.samples))


def apply_symbol(grid: Grid, samples: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Multiply by a Fourier symbol defined on grid.k_squared's layout."""
    return sfft.ifftn(symbol * sfft.fftn(samples)).real


# =============================================================================
# Resampling
# =============================================================================


def _axis_shape(dim: int, axis: int, n: int):
    shape = [1] * dim
    shape[axis] = n
    return shape


def _spectral_affine_axis(
    values: np.ndarray, grid: Grid, axis: int, scale: float, offset: float
) -> np.ndarray:
    """Trigonometric interpolant along one axis evaluated at scale * x_j + offset.

    Sorted wavenumbers kappa_m = kappa_0 + m dk turn the evaluation into a
    chirp z-transform with ratio w = exp(i dk scale h).
    """
    M = grid.points_per_dim
    h = grid.spacing
    x0 = -grid.half_width
    dk = 2.0 * np.pi / (M * h)
    kappa = sfft.fftshift(2.0 * np.pi * sfft.fftfreq(M, d=h))
    coeffs = sfft.fftshift(sfft.fft(values, axis=axis), axes=axis) / M

    shape = _axis_shape(values.ndim, axis, M)
    phase0 = scale * x0 + offset - x0
    coeffs = coeffs * np.exp(1j * kappa * phase0).reshape(shape)
    transformed = signal.czt(coeffs, m=M, w=np.exp(1j * dk * scale * h), a=1.0, axis=axis)
    j = np.arange(M)
    out = np.real(transformed * np.exp(1j * kappa[0] * scale * h * j).reshape(shape))

    targets = scale * grid.axis + offset
    outside = (targets < -grid.half_width) | (targets >= grid.half_width)
    if np.any(outside):
        out = np.where(outside.reshape(shape), 0.0, out)
    return out


def resample_affine(
    u: Field,
    scale: float,
    offset: Optional[Sequence[float]] = None,
    interpolation: Optional[str] = None,
) -> np.ndarray:
    """
    Samples of x -> u(scale * x + offset), zero where the source leaves the box.

    Args:
        u: Field to resample
        scale: Positive dilation factor applied to every axis
        offset: Per-axis shift of the source point (defaults to 0)
        interpolation: "spectral" or "linear" (defaults to u.grid.interpolation)

    Returns:
        Array of samples on u.grid
    """
    grid = u.grid
    if interpolation is None:
        interpolation = grid.interpolation
    if offset is None:
        offset = np.zeros(grid.dim)
    offset = np.broadcast_to(np.asarray(offset, dtype=float), (grid.dim,))
    if interpolation not in INTERPOLATION_MODES:
        raise ValueError(
            f"interpolation must be one of {INTERPOLATION_MODES}, got {interpolation!r}"
        )

    if interpolation == "spectral":
        out = u.samples
        for axis in range(grid.dim):
            out = _spectral_affine_axis(out, grid, axis, scale, float(offset[axis]))
        return out

    index_axes = [
        (scale * grid.axis + offset[axis] + grid.half_width) / grid.spacing
        for axis in range(grid.dim)
    ]
    coords = np.meshgrid(*index_axes, indexing="ij")
    return ndimage.map_coordinates(u.samples, coords, order=1, mode="constant", cval=0.0)


def support_radius(u: Field, rel: float = 1e-8) -> float:
    """Largest |x| where |u| exceeds rel * max|u|; 0 for the zero field."""
    peak = np.max(np.abs(u.samples))
    if peak == 0:
        return 0.0
    mask = np.abs(u.samples) > rel * peak
    return float(np.sqrt(np.max(u.grid.radius_sq[mask])))


def boundary_fraction(u: Field, layer: int = 2) -> float:
    """Peak of |u| on the outer `layer` planes of the box relative to max |u|."""
    peak = np.max(np.abs(u.samples))
    if peak == 0:
        return 0.0
    edge = np.zeros(u.grid.shape, dtype=bool)
    for axis in range(u.grid.dim):
        index = [slice(None)] * u.grid.dim
        index[axis] = np.r_[0:layer, -layer:0]
        edge[tuple(index)] = True
    return float(np.max(np.abs(u.samples[edge])) / peak)


def scale_fiber(
    u: Field, t: float, interpolation: Optional[str] = None
) -> Field:
    """
    Mass-preserving dilation (t * u)(x) = t^{N/2} u(t x).

    Args:
        u: Field to dilate
        t: Positive scaling parameter
        interpolation: "spectral" or "linear" (defaults to u.grid.interpolation)

    Returns:
        The dilated field on the same grid
    """
    if not t > 0:
        raise ValueError(f"fiber parameter must be positive, got {t}")
    if t == 1.0:
        return u
    grid = u.grid
    ratio = grid.spacing / grid.half_width
    if t < ratio or t > 1.0 / ratio:
        logger.warning(
            "scale_fiber: t=%.3g is outside [%.3g, %.3g]; resampling is ill-posed",
            t,
            ratio,
            1.0 / ratio,
        )
    elif t < 1.0 and support_radius(u) / t > grid.half_width:
        logger.warning(
            "scale_fiber: dilated support %.3g exceeds the box half width %.3g",
            support_radius(u) / t,
            grid.half_width,
        )
    values = resample_affine(u, t, None, interpolation)
    return u.with_samples(t ** (grid.dim / 2.0) * values)


def translate(
    u: Field, y: Sequence[float], interpolation: Optional[str] = None
) -> Field:
    """
    Translation x -> u(x - y).

    Args:
        u: Field to move
        y: Shift vector of length dim
        interpolation: "spectral" or "linear" (defaults to u.grid.interpolation)

    Returns:
        The translated field; parts moved outside the box are dropped
    """
    y = np.broadcast_to(np.asarray(y, dtype=float), (u.grid.dim,))
    if not np.any(y):
        return u
    if support_radius(u) + float(np.linalg.norm(y)) > u.grid.half_width:
        logger.warning(
            "translate: shift |y|=%.3g clips the support at the box boundary",
            float(np.linalg.norm(y)),
        )
    return u.with_samples(resample_affine(u, 1.0, -y, interpolation))


def project_mass(u: Field, c: float) -> Field:
    """
    Rescale u onto S_c.

    Args:
        u: Nonzero field
        c: Target mass

    Returns:
        sqrt(c / mass(u)) * u

    Raises:
        ZeroFieldError: If u has zero mass
    """
    if not c > 0:
        raise ValueError(f"mass must be positive, got {c}")
    m = mass(u)
    if m == 0:
        raise ZeroFieldError("zero-field: cannot project the zero field onto S_c")
    return u.with_samples(np.sqrt(c / m) * u.samples)


def even_part(u: Field) -> Field:
    """(u(x) + u(-x)) / 2."""
    return u.with_samples(0.5 * (u.samples + u.grid.reflect(u.samples)))


def is_even(u: Field, rel: float = 1e-10) -> bool:
    peak = np.max(np.abs(u.samples))
    if peak == 0:
        return True
    return bool(np.max(np.abs(u.samples - u.grid.reflect(u.samples))) <= rel * peak)


def random_smooth_field(
    grid: Grid,
    rng: np.random.Generator,
    spread: float,
    widths: Sequence[float] = (0.5, 2.0),
    max_bumps: int = 3,
) -> Field:
    """
    Positive sum of one to max_bumps Gaussians.

    Centers are uniform in [-spread, spread]^N, widths uniform in `widths`
    and heights uniform in [0.5, 1.5].
    """
    count = int(rng.integers(1, max_bumps + 1))
    centers = rng.uniform(-spread, spread, size=(count, grid.dim))
    sigmas = rng.uniform(widths[0], widths[1], size=count)
    heights = rng.uniform(0.5, 1.5, size=count)
    values = np.zeros(grid.shape)
    for center, sigma, height in zip(centers, sigmas, heights):
        r2 = sum((x - x0) ** 2 for x, x0 in zip(grid.coordinates, center))
        values = values + height * np.exp(-r2 / (2.0 * sigma**2))
    return Field(grid, values)
