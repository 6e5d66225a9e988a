"""Grids, fields and the spectral operators on them."""

from .grid import Grid, make_grid
from .field import (
    Field,
    zeros,
    from_function,
    inner,
    mass,
    grad_norm_sq,
    lp_norm_p,
    laplacian,
    scale_fiber,
    translate,
    project_mass,
    even_part,
    is_even,
)

__all__ = [
    "Grid",
    "make_grid",
    "Field",
    "zeros",
    "from_function",
    "inner",
    "mass",
    "grad_norm_sq",
    "lp_norm_p",
    "laplacian",
    "scale_fiber",
    "translate",
    "project_mass",
    "even_part",
    "is_even",
]
