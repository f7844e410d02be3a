"""
Configuration loading for traceforms.

Supports loading configuration from:
- Environment variables
- Configuration files (TOML, YAML, JSON)
- CLI arguments (highest priority)

Each section knows how to build the numeric objects it describes.
"""

import hashlib
import json
import math
import os
from pathlib import Path
from typing import Any, Literal

import click
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from traceforms.numerics.kato import LebesgueInterval
from traceforms.numerics.kernels import Kernel, KernelType
from traceforms.numerics.measures import (
    AtomicMeasure,
    Direction,
    MeasureSequence,
    SphereFamilyMeasure,
    geometric_weights,
    thinning_shell_sequence,
    truncate_sequence,
)
from traceforms.numerics.potentials import EvaluationGrid

# Default configuration file locations
CONFIG_FILE_NAMES = [
    ".traceforms.toml",
    ".traceforms.yaml",
    ".traceforms.yml",
    ".traceforms.json",
    "traceforms.toml",
    "traceforms.yaml",
    "traceforms.yml",
    "traceforms.json",
]

ENV_PREFIX = "TRACEFORMS_"


class ConfigError(click.ClickException):
    """Invalid or unreadable configuration (exit code 1)."""

    exit_code = 1


class KernelConfig(BaseModel):
    """Which Green kernel to use."""

    type: KernelType = Field(default=KernelType.EXPONENTIAL_1D, description="Kernel family")
    d: int | None = Field(
        default=None, ge=1, description="Ambient dimension (default 1, or 3 for newtonian)"
    )
    alpha: float | None = Field(default=None, description="Riesz order")

    @model_validator(mode="after")
    def _buildable(self) -> "KernelConfig":
        try:
            self.build()
        except ValidationError as e:
            raise ValueError(e.errors()[0]["msg"]) from None
        return self

    def build(self) -> Kernel:
        d = self.d if self.d is not None else (3 if self.type == KernelType.NEWTONIAN else 1)
        return Kernel(type=self.type, d=d, alpha=self.alpha)


class MeasureConfig(BaseModel):
    """An atomic measure, a concentric sphere family or a Lebesgue interval."""

    family: Literal["atomic", "spheres", "interval"] = Field(default="atomic")
    points: list[float] | list[list[float]] | None = Field(
        default=None, description="Atom locations (flat list in 1D)"
    )
    weights: list[float] | None = Field(default=None, description="Atom weights")
    radii: list[float] | None = Field(default=None, description="Sphere radii, increasing")
    masses: list[float] | None = Field(default=None, description="Sphere masses")
    interval: tuple[float, float] | None = Field(
        default=None, description="[lo, hi] of a Lebesgue interval (admissibility tests only)"
    )
    path: str | None = Field(default=None, description="JSON file holding the other fields")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"family": "atomic", "points": [0.0, 1.0], "weights": [1.0, 1.0]},
                {"family": "spheres", "radii": [1.0], "masses": [12.566370614359172]},
            ]
        }
    }

    @field_validator("path")
    @classmethod
    def _path_exists(cls, value: str | None) -> str | None:
        if value is not None and not Path(value).exists():
            raise ValueError(f"measure file not found: {value}")
        return value

    def resolved(self) -> "MeasureConfig":
        """This config with the referenced file merged in."""
        if self.path is None:
            return self
        data = json.loads(Path(self.path).read_text(encoding="utf-8"))
        merged = deep_merge(self.model_dump(exclude={"path"}, exclude_none=True), data)
        return MeasureConfig.model_validate(merged)

    def build(self) -> AtomicMeasure | SphereFamilyMeasure | LebesgueInterval:
        cfg = self.resolved()
        if cfg.family == "interval":
            lo, hi = cfg.interval or (0.0, 1.0)
            return LebesgueInterval(lo=lo, hi=hi)
        if cfg.family == "spheres":
            return SphereFamilyMeasure(
                radii=cfg.radii or [1.0], masses=cfg.masses or [4 * math.pi]
            )
        points = cfg.points if cfg.points is not None else [0.0]
        weights = cfg.weights if cfg.weights is not None else [1.0] * len(points)
        if len(points) != len(weights):
            raise ConfigError(f"measure has {len(points)} points but {len(weights)} weights")
        return AtomicMeasure(points=points, weights=weights)


class SequenceConfig(BaseModel):
    """A monotone measure family with its finite limit."""

    kind: Literal["truncated-exponential", "thinning-shell", "explicit"] = Field(
        default="truncated-exponential"
    )
    rate: float = Field(default=0.5, gt=0, description="a_k = rate^|k|")
    schedule: list[int] | None = Field(default=None, description="Cutoffs n")
    n_max: int = Field(default=40, ge=0, description="Cutoff of the finite limit")
    slices: int = Field(default=8, ge=1, description="Slices per 1/n of shell")
    radius: float = Field(default=1.0, gt=0)
    terms: list[MeasureConfig] = Field(default_factory=list, description="Explicit terms")
    limit: MeasureConfig | None = Field(default=None, description="Explicit limit")
    direction: Direction = Field(default=Direction.INCREASING)

    @field_validator("schedule")
    @classmethod
    def _nonnegative(cls, value: list[int] | None) -> list[int] | None:
        if value is not None and any(n < 0 for n in value):
            raise ValueError("schedule entries must be nonnegative")
        return value

    def build(self) -> MeasureSequence:
        if self.kind == "truncated-exponential":
            schedule = self.schedule if self.schedule is not None else list(range(31))
            return truncate_sequence(geometric_weights(self.rate), schedule, self.n_max)
        if self.kind == "thinning-shell":
            schedule = self.schedule if self.schedule is not None else [2, 4, 8, 16, 32]
            return thinning_shell_sequence(schedule, slices=self.slices, radius=self.radius)
        if not self.terms or self.limit is None:
            raise ConfigError("explicit sequences need terms and a limit")
        labels = tuple(self.schedule) if self.schedule is not None else ()
        return MeasureSequence(
            terms=tuple(t.build() for t in self.terms),  # type: ignore[misc]
            limit=self.limit.build(),  # type: ignore[arg-type]
            direction=self.direction,
            labels=labels,
        )


class GridConfig(BaseModel):
    """Finite grid standing in for sup over the whole space."""

    lo: float = Field(default=-5.0)
    hi: float = Field(default=5.0)
    step: float = Field(default=0.01, gt=0)
    extra_points: list[float] | list[list[float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _ordered(self) -> "GridConfig":
        if self.hi < self.lo:
            raise ValueError("grid needs hi >= lo")
        return self

    def build(self, dim: int = 1, measures: tuple = ()) -> EvaluationGrid:
        return EvaluationGrid.build(
            self.lo,
            self.hi,
            self.step,
            dim=dim,
            extra_points=list(self.extra_points) or None,
            measures=tuple(m for m in measures if not isinstance(m, LebesgueInterval)),
        )


class SpectrumConfig(BaseModel):
    multiplicity_tol: float = Field(default=1e-8, gt=0)
    consistency_tol: float = Field(default=1e-9, gt=0, description="Cross-representation tolerance")
    extension_points: int = Field(default=100, ge=1, description="Off-support points for the extension check")
    rayleigh_trials: int = Field(default=1000, ge=1)
    alpha: float = Field(default=1.0, ge=0, description="Resolvent parameter of the identity check")


class ConvergeConfig(BaseModel):
    k_max: int = Field(default=3, ge=1)
    intervals: list[tuple[float, float]] | None = Field(
        default=None, description="Energy intervals for the dimension-stability check"
    )
    strict_rank: bool = Field(default=False)
    convergence_tol: float = Field(default=1e-6, gt=0)
    multiplicity_tol: float = Field(default=1e-8, gt=0)
    identity_tol: float = Field(default=1e-10, gt=0)
    ratio_window: tuple[int, int] = Field(
        default=(5, 35), description="n range over which the running sup of the ratios is compared"
    )
    ratio_variation: float = Field(default=0.5, gt=0, description="Allowed relative growth of the running sup")
    operator_trials: int = Field(default=100, ge=1, description="Random bounded test functions per n")
    resolvent_alpha: float | None = Field(
        default=1.0, description="alpha of the bounded-function resolvent check (None to skip)"
    )


class Graph1dConfig(BaseModel):
    rate: float = Field(default=0.5, gt=0)
    n: int = Field(default=10, ge=0, description="Largest cutoff; every n' <= n is validated")
    tol: float = Field(default=1e-9, gt=0)


class BallConfig(BaseModel):
    m: int = Field(default=0, ge=0)
    m_max: int | None = Field(default=None, ge=0, description="Tabulate m = 0..m_max")
    tol: float = Field(default=1e-8, gt=0)
    ns: list[int] = Field(default_factory=lambda: [2, 4, 8, 16, 32])
    quadrature_points: int = Field(default=1000, ge=1000)
    radial_points: int = Field(default=2001, ge=2)
    slope_tol: float = Field(default=0.1, gt=0)


class StationaryConfig(BaseModel):
    alpha: float = Field(default=1.0, ge=0)
    u: float | list[float] = Field(default=1.0, description="Radial data (constant or per sphere)")
    h: float = Field(default=1e-3, gt=0, description="Finite-difference step of the Laplacian")
    jump_h: float = Field(default=1e-5, gt=0)
    jump_tol: float = Field(default=1e-4, gt=0)
    identity_tol: float = Field(default=1e-10, gt=0)
    harmonic_tol: float = Field(default=1e-6, gt=0)
    far_radius: float = Field(default=1e3, gt=0)
    far_tol: float = Field(default=1e-6, gt=0)
    r_max: float = Field(default=3.0, gt=0, description="Field sampled on [0, r_max]")
    samples: int = Field(default=301, ge=2)


class KatoConfig(BaseModel):
    radii: list[float] = Field(default_factory=lambda: [0.1, 0.01, 0.001])
    tol: float = Field(default=0.2, gt=0)
    s: float | None = Field(default=None, gt=0, description="Volume-growth exponent")

    @field_validator("radii")
    @classmethod
    def _decreasing(cls, value: list[float]) -> list[float]:
        if not value or any(r <= 0 for r in value):
            raise ValueError("radii must be positive")
        if any(b >= a for a, b in zip(value, value[1:], strict=False)):
            raise ValueError("radii must be strictly decreasing")
        return value


class RunnerConfig(BaseModel):
    threads: int | None = Field(default=None, ge=1, description="Worker threads (None = library default)")
    timeout: float | None = Field(default=None, gt=0, description="Seconds before an experiment is abandoned")
    seed: int = Field(default=0, description="Seed of randomized property checks only")


class OutputConfig(BaseModel):
    """Configuration for output formatting."""

    format: Literal["json", "markdown"] = Field(default="json")
    out_dir: str | None = Field(default=None, description="Directory for <command>.csv/.json")
    verbose: bool = Field(default=False)


class Config(BaseModel):
    """Complete configuration for traceforms."""

    kernel: KernelConfig = Field(default_factory=KernelConfig)
    measure: MeasureConfig = Field(default_factory=MeasureConfig)
    sequence: SequenceConfig = Field(default_factory=SequenceConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    spectrum: SpectrumConfig = Field(default_factory=SpectrumConfig)
    converge: ConvergeConfig = Field(default_factory=ConvergeConfig)
    graph1d: Graph1dConfig = Field(default_factory=Graph1dConfig)
    ball: BallConfig = Field(default_factory=BallConfig)
    stationary: StationaryConfig = Field(default_factory=StationaryConfig)
    kato: KatoConfig = Field(default_factory=KatoConfig)
    runner: RunnerConfig = Field(default_factory=RunnerConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of the effective configuration."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def find_config_file(start_dir: Path | None = None) -> Path | None:
    """Search upwards from start_dir (default: cwd) for a config file."""
    current = (start_dir or Path.cwd()).resolve()
    while True:
        for config_name in CONFIG_FILE_NAMES:
            config_path = current / config_name
            if config_path.exists():
                return config_path
        parent = current.parent
        if parent == current:
            return None
        current = parent


def load_config_file(path: Path) -> dict[str, Any]:
    """Load a TOML, YAML or JSON config file into a dictionary."""
    suffix = path.suffix.lower()
    content = path.read_text(encoding="utf-8")

    if suffix == ".toml":
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib  # type: ignore
        return tomllib.loads(content)

    if suffix in (".yaml", ".yml"):
        try:
            import yaml
        except ImportError:
            raise ConfigError(
                "PyYAML is required to load YAML config files. "
                "Install with: pip install traceforms[yaml]"
            ) from None
        return yaml.safe_load(content) or {}

    if suffix == ".json":
        return json.loads(content)

    raise ConfigError(f"Unsupported config file format: {suffix}")


def load_config(
    config_file: Path | str | None = None,
    search: bool = True,
    overrides: dict[str, Any] | None = None,
) -> Config:
    """
    Load configuration from file, environment and CLI overrides.

    Priority (highest to lowest):
    1. overrides (CLI options)
    2. Environment variables
    3. Explicit config_file, else an auto-discovered config file
    4. Defaults
    """
    config_data: dict[str, Any] = {}
    source: Path | None = None
    if config_file:
        source = Path(config_file)
        if not source.exists():
            raise ConfigError(f"Config file not found: {source}")
    elif search:
        source = find_config_file()

    if source is not None:
        try:
            config_data = load_config_file(source)
        except (ValueError, OSError) as e:
            raise ConfigError(f"Could not parse {source}: {e}") from e

    config_data = deep_merge(config_data, load_env_config())
    config_data = deep_merge(config_data, overrides or {})

    try:
        return Config.model_validate(config_data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def load_env_config() -> dict[str, Any]:
    """
    Load configuration from environment variables.

    TRACEFORMS_<SECTION>_<KEY>, for example TRACEFORMS_CONVERGE_K_MAX=4
    or TRACEFORMS_KATO_RADII=0.1,0.01.
    """
    config: dict[str, Any] = {}
    for key, value in os.environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        parts = key[len(ENV_PREFIX) :].lower().split("_", 1)
        if len(parts) != 2:
            continue
        section, field = parts
        config.setdefault(section, {})[field] = parse_env_value(value)
    return config


def parse_env_value(value: str) -> Any:
    """Parse an environment variable value to an appropriate Python type."""
    lowered = value.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    if lowered in ("none", "null", ""):
        return None

    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass

    if "," in value:
        return [parse_env_value(v.strip()) for v in value.split(",")]
    return value


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Deep merge two dictionaries; override wins."""
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value
    return result
