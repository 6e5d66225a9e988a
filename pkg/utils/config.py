"""
Run configuration: TOML tables validated by pydantic.

    [grid]       dim, half_width, points_per_dim, interpolation
    [params]     a, b, c, p, q
    [potential]  family, sign, h0, width, decay_s, bumps
    [solver]     mode, tolerances, seeds, starts, threads, path and lattice sizes
    [output]     directory, formats

Every key has a default, so an empty file is a valid subcritical limit run.
"""

import logging
import tomllib
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from fields.grid import Grid, make_grid
from functionals.params import KirchhoffParams
from potentials.families import PotentialSpec
from utils.defaults import (
    DEFAULT_INTERPOLATION,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    LATTICE_ANGLES,
    LATTICE_RADII,
    LATTICE_S_VALUES,
    MAX_ITERATIONS,
    MAX_PATH_SWEEPS,
    MULTI_START,
    PATH_NODES,
    RESIDUAL_TOL,
    default_grid,
)
from utils.errors import ConfigError, RegimeError

logger = logging.getLogger(__name__)

Mode = Literal["min", "mp", "link", "limit", "gn", "verify"]
CheckGroup = Literal["identities", "subcritical", "supercritical_positive", "supercritical_negative"]

SUBCRITICAL_MODES = ("min",)
SUPERCRITICAL_MODES = ("mp", "link")


class GridConfig(BaseModel):
    """[grid] table; half_width and points_per_dim default per dimension."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dim: int = Field(default=1, description="Spatial dimension N")
    half_width: Optional[float] = Field(default=None, description="Box half width L")
    points_per_dim: Optional[int] = Field(default=None, description="Points per axis M")
    interpolation: Literal["spectral", "linear"] = DEFAULT_INTERPOLATION

    @field_validator("dim")
    @classmethod
    def validate_dim(cls, v):
        if v not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {v}")
        return v

    def to_grid(self) -> Grid:
        half_width, points = default_grid(self.dim)
        return make_grid(
            self.dim,
            self.half_width if self.half_width is not None else half_width,
            self.points_per_dim if self.points_per_dim is not None else points,
            interpolation=self.interpolation,
        )


class ParamsConfig(BaseModel):
    """[params] table."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float = Field(default=1.0, gt=0)
    b: float = Field(default=1.0, gt=0)
    c: float = Field(default=1.0, gt=0)
    p: float = Field(default=3.0, gt=2)
    q: float = Field(default=1.5)

    @field_validator("q")
    @classmethod
    def validate_q(cls, v):
        if not 1.0 <= v < 2.0:
            raise ValueError(f"q must satisfy 1 <= q < 2, got {v}")
        return v


class SolverConfig(BaseModel):
    """[solver] table."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Mode = "limit"
    residual_tol: float = Field(default=RESIDUAL_TOL, gt=0)
    max_iterations: int = Field(default=MAX_ITERATIONS, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    starts: int = Field(default=MULTI_START, ge=1)
    threads: int = Field(default=DEFAULT_THREADS, ge=1)
    path_nodes: int = Field(default=PATH_NODES, ge=3)
    max_path_sweeps: int = Field(default=MAX_PATH_SWEEPS, ge=1)
    # Q = B_R x [s1, s2]; certification is reported, not assumed
    R: float = Field(default=2.0, gt=0)
    s1: float = Field(default=-2.0, lt=0)
    s2: float = Field(default=2.0, gt=0)
    lattice_radii: int = Field(default=LATTICE_RADII, ge=2)
    lattice_angles: int = Field(default=LATTICE_ANGLES, ge=1)
    lattice_s_values: int = Field(default=LATTICE_S_VALUES, ge=3)
    epsilon: Optional[float] = Field(default=None, gt=0)
    refine_linking: bool = True
    groups: List[CheckGroup] = Field(default_factory=lambda: ["identities"])
    superadditivity_masses: List[float] = Field(default_factory=lambda: [0.5, 0.5])
    scan_points: int = Field(default=200, ge=2)

    @property
    def grid_Q(self):
        return (self.lattice_radii, self.lattice_angles, self.lattice_s_values)


class OutputConfig(BaseModel):
    """[output] table; formats lists the tabular exports written next to every scan."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: str = "runs/latest"
    formats: List[Literal["json", "csv"]] = Field(default_factory=lambda: ["csv"])


class RunConfig(BaseModel):
    """A whole run: one block per TOML table."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    grid: GridConfig = Field(default_factory=GridConfig)
    params: ParamsConfig = Field(default_factory=ParamsConfig)
    potential: PotentialSpec = Field(default_factory=PotentialSpec)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def validate_regime(self):
        params = self.kirchhoff_params()
        mode = self.solver.mode
        if mode in SUBCRITICAL_MODES and params.regime != "subcritical":
            raise RegimeError(
                f"mode {mode!r} needs p < {params.p_mass_critical:.6g}, got p={params.p}",
                {"field": "solver.mode"},
            )
        if mode in SUPERCRITICAL_MODES and params.regime != "supercritical":
            raise RegimeError(
                f"mode {mode!r} needs p > {params.p_bar:.6g}, got p={params.p}",
                {"field": "solver.mode"},
            )
        return self

    def kirchhoff_params(self) -> KirchhoffParams:
        return KirchhoffParams(dim=self.grid.dim, **self.params.model_dump())

    def with_overrides(
        self,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        out: Optional[str] = None,
    ) -> "RunConfig":
        """Apply CLI flags on top of the validated file."""
        solver = self.solver.model_copy(
            update={k: v for k, v in {"seed": seed, "threads": threads}.items() if v is not None}
        )
        output = self.output.model_copy(update={"directory": out} if out else {})
        return self.model_copy(update={"solver": solver, "output": output})


def _describe_errors(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        field = ".".join(str(x) for x in item["loc"]) or "config"
        parts.append(f"{field}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: dict) -> RunConfig:
    """
    Validate an already parsed TOML document.

    Raises:
        ConfigError: With the dotted field path and the violated constraint
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        fields = [".".join(str(x) for x in item["loc"]) for item in e.errors()]
        raise ConfigError(f"invalid configuration: {_describe_errors(e)}", {"fields": fields})


def load_config(path: Optional[Union[str, Path]] = None, mode: Optional[str] = None) -> RunConfig:
    """
    Read and validate a TOML run configuration.

    Args:
        path: TOML file; None gives the all-default configuration
        mode: Replaces solver.mode before validation (the CLI subcommand)

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: If the file is missing, is not TOML or fails validation
    """
    data: dict = {}
    if path is not None:
        data = _read_toml(Path(path))
    if mode is not None:
        data = {**data, "solver": {**data.get("solver", {}), "mode": mode}}
    config = parse_config(data)
    logger.info("loaded configuration %s (mode=%s)", path or "<defaults>", config.solver.mode)
    return config


def _read_toml(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"configuration file not found: {path}", {"path": str(path)})
    try:
        return tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}", {"path": str(path)})
