"""
Numerical defaults for the Kirchhoff solvers.

Every size, tolerance and iteration cap used by the package is declared here
once. The run configuration (utils.config) starts from these values and
overrides them per run.
"""

from typing import Dict, Tuple

# =============================================================================
# Grid Configuration
# =============================================================================

# (half_width L, points_per_dim M) per dimension; box is [-L, L)^N
DEFAULT_GRIDS: Dict[int, Tuple[float, int]] = {
    1: (20.0, 1024),
    2: (15.0, 256),
    3: (10.0, 64),
}

MIN_POINTS_PER_DIM = 16

# Largest admissible M^N (float64 samples per field)
MAX_GRID_POINTS = 2**24

# Relative tolerance for membership in S_c
MASS_TOL = 1e-8

# Resampling used by scale_fiber / translate
INTERPOLATION_MODES = ("spectral", "linear")
DEFAULT_INTERPOLATION = "spectral"

# A field "decays" when its boundary layer stays below this fraction of its peak
DECAY_TOL = 1e-6

# =============================================================================
# Descent Configuration
# =============================================================================

RESIDUAL_TOL = 1e-6  # el_residual <= RESIDUAL_TOL * a * |grad u|^2
POHOZAEV_TOL = 1e-4  # |P(u)| <= POHOZAEV_TOL * (a G + b G^2)
MAX_ITERATIONS = 5000

# tau0 = INITIAL_STEP_FACTOR * spacing^2 / a without preconditioning
INITIAL_STEP_FACTOR = 0.1
# tau0 in the metric of the Sobolev preconditioner
PRECONDITIONED_STEP = 0.5

# Barzilai-Borwein steps are clamped to [lo, hi] * tau0
BB_STEP_RANGE = (1e-3, 1e3)
NONMONOTONE_WINDOW = 10
ARMIJO_SLOPE = 1e-4
MAX_BACKTRACKS = 30

NEWTON_ITERATIONS = 20

# =============================================================================
# Fiber and Landscape Configuration
# =============================================================================

FIBER_BRACKET = (1e-2, 1e2)
LOCAL_FIBER_BRACKET = (0.8, 1.25)
FIBER_SCAN_POINTS = 81

ROOT_RTOL = 1e-10

GN_MAX_ITERATIONS = 2000
GN_TOL = 1e-11
# Decay length of the rescaled soliton is half_width / GN_DECAY_FACTOR
GN_DECAY_FACTOR = 25.0

# =============================================================================
# Min-Max Configuration
# =============================================================================

MULTI_START = 8
DEFAULT_SEED = 0
DISTINCT_PROFILE_TOL = 1e-3

PATH_NODES = 33
PATH_STABLE_TOL = 1e-7
PATH_STABLE_SWEEPS = 50
MAX_PATH_SWEEPS = 2000

LATTICE_RADII = 17
LATTICE_ANGLES = 16
LATTICE_S_VALUES = 25
BOUNDARY_REFINEMENT = 2
# Boundary certificate uses m_c + LINKING_EPSILON * m_c unless epsilon is given
LINKING_EPSILON = 0.05

DEFAULT_THREADS = 1


def default_grid(dim: int) -> Tuple[float, int]:
    """
    Get the default (half_width, points_per_dim) for a dimension.

    Args:
        dim: Spatial dimension N

    Returns:
        Tuple of box half width and points per axis
    """
    if dim not in DEFAULT_GRIDS:
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    return DEFAULT_GRIDS[dim]

