import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.sim.base.errors import ConfigError
from app.sim.base.models import StepConfig
from app.sim.forcing.models_forcing import ForcingSpec
from app.sim.rotburgers2d.models_rotburgers2d import SimConfig2
from app.sim.rotburgers3d.models_rotburgers3d import Rhs3Variant, SimConfig3
from app.sim.rotkse2d.models_rotkse2d import KseConfig
from app.sim.spectral.models_spectral import Grid, make_grid

log = logging.getLogger(__name__)

SECTIONS = ("equation", "grid", "forcing", "initial", "output")

EquationName = Literal["rotburgers2d", "rotburgers3d", "rotkse2d"]
ProfileName = Literal[
    "blowup2d", "blowup3d", "taylor_green", "abc", "random_smooth", "cos_mode"
]

DIMENSIONS = {"rotburgers2d": 2, "rotburgers3d": 3, "rotkse2d": 2}


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)


class EquationSection(_Section):
    name: EquationName
    nu: float = Field(0.0, ge=0.0)
    gamma: float = Field(0.0, ge=0.0)
    lambda_: float | None = Field(None, alias="lambda", ge=0.0)
    variant: Rhs3Variant = Rhs3Variant.ROTATIONAL
    t_end: float = Field(..., gt=0.0)
    dt: float | None = Field(None, gt=0.0)
    cfl: float | None = Field(None, gt=0.0, le=0.25)
    dealias: bool = True
    diag_every: int = Field(10, ge=1)
    snapshot_every: int = Field(1000, ge=1)
    spectrum_every: int | None = Field(None, ge=1)
    guard: float = Field(1e6, gt=0.0)
    resolution_guard: float = Field(1.0, ge=0.0)


class GridSection(_Section):
    n: int = Field(..., ge=8)


class ForcingSection(_Section):
    kind: Literal["none", "annulus", "file"] = "none"
    seed: int = Field(0, ge=0, lt=2**64)
    k_min: float = Field(0.5, ge=0.0)
    k_max: float = Field(2.5, gt=0.0)
    grashof: float | None = Field(None, gt=0.0)
    path: Path | None = None


class InitialSection(_Section):
    kind: Literal["zero", "snapshot", "profile"] = "zero"
    path: Path | None = None
    profile: ProfileName | None = None
    amplitude: float = 1.0
    seed: int = Field(0, ge=0, lt=2**64)
    k_max: float = Field(4.0, gt=0.0)
    conserved: float | None = Field(
        None, gt=0.0, description="2v₀² + w₀² for blowup3d"
    )


class OutputSection(_Section):
    dir: Path = Path("output")


class RunConfig(BaseModel):
    """One simulation as described by a key=value config file"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    equation: EquationSection
    grid: GridSection
    forcing: ForcingSection = ForcingSection()
    initial: InitialSection = InitialSection()
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        eq = self.equation
        if eq.name == "rotkse2d":
            if eq.lambda_ is None:
                raise ConfigError("required for rotkse2d", field="equation.lambda")
            if eq.dt is None:
                raise ConfigError("rotkse2d needs a fixed dt", field="equation.dt")
            if self.forcing.kind != "none":
                raise ConfigError("rotkse2d is unforced", field="forcing.kind")
        elif eq.lambda_ is not None:
            raise ConfigError(f"not used by {eq.name}", field="equation.lambda")

        if self.forcing.kind == "annulus":
            if self.forcing.grashof is None:
                raise ConfigError(
                    "annulus forcing needs grashof", field="forcing.grashof"
                )
            if eq.nu <= 0:
                raise ConfigError("Grashof scaling needs nu > 0", field="equation.nu")
        if self.forcing.kind == "file":
            _require_file(self.forcing.path, "forcing.path")

        if self.initial.kind == "snapshot":
            _require_file(self.initial.path, "initial.path")
        if self.initial.kind == "profile":
            profile = self.initial.profile
            if profile is None:
                raise ConfigError(
                    "profile initial data needs a name", field="initial.profile"
                )
            if profile == "blowup2d" and eq.name == "rotburgers3d":
                raise ConfigError("blowup2d is a 2D profile", field="initial.profile")
            if profile == "blowup3d" and eq.name != "rotburgers3d":
                raise ConfigError("blowup3d is a 3D profile", field="initial.profile")
            if profile == "abc" and eq.name != "rotburgers3d":
                raise ConfigError("abc is a 3D profile", field="initial.profile")
        return self

    @property
    def dim(self) -> int:
        return DIMENSIONS[self.equation.name]

    @property
    def grid_model(self) -> Grid:
        try:
            return make_grid(self.grid.n, self.dim)
        except ValidationError as e:
            raise config_error(e, prefix="grid") from e

    def solver_config(self) -> StepConfig:
        """SimConfig2, SimConfig3 or KseConfig for the configured equation"""
        eq = self.equation
        common = eq.model_dump(include=set(StepConfig.model_fields))
        try:
            if eq.name == "rotburgers2d":
                return SimConfig2(**common, nu=eq.nu, gamma=eq.gamma)
            if eq.name == "rotburgers3d":
                return SimConfig3(
                    **common, nu=eq.nu, gamma=eq.gamma, variant=eq.variant
                )
            return KseConfig(**common, lambda_=eq.lambda_)
        except ValidationError as e:
            raise config_error(e, prefix="equation") from e

    def forcing_spec(self) -> ForcingSpec | None:
        fc = self.forcing
        if fc.kind != "annulus":
            return None
        try:
            return ForcingSpec(
                seed=fc.seed,
                k_min=fc.k_min,
                k_max=fc.k_max,
                grashof=fc.grashof,
                nu=self.equation.nu,
            )
        except ValidationError as e:
            raise config_error(e, prefix="forcing") from e


def _require_file(path: Path | None, field: str) -> None:
    if path is None:
        raise ConfigError("a path is required", field=field)
    if not path.is_file():
        raise ConfigError(f"file {path} does not exist", field=field)


def config_error(e: ValidationError, prefix: str = "") -> ConfigError:
    """ConfigError naming the first offending field of a pydantic error"""
    first = e.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    if prefix:
        location = f"{prefix}.{location}" if location else prefix
    message = first.get("msg", str(e))
    cause = first.get("ctx", {}).get("error")
    if isinstance(cause, ConfigError):
        return cause
    return ConfigError(message, field=location or None)


def parse_config_text(
    text: str, source: str = "<config>"
) -> dict[str, dict[str, str]]:
    """Nested sections from flat `section.key = value` lines; # starts a comment"""
    sections: dict[str, dict[str, str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        section, dot, name = key.partition(".")
        if not dot or not name or "." in name:
            raise ConfigError(
                f"{source}:{number}: keys look like section.name", field=key
            )
        if section not in SECTIONS:
            raise ConfigError(f"{source}:{number}: unknown section", field=key)
        if not value:
            raise ConfigError(f"{source}:{number}: empty value", field=key)
        entries = sections.setdefault(section, {})
        if name in entries:
            raise ConfigError(f"{source}:{number}: duplicate key", field=key)
        entries[name] = value
    return sections


def load_config_text(text: str, source: str = "<config>") -> RunConfig:
    sections = parse_config_text(text, source)
    try:
        config = RunConfig.model_validate(sections)
    except ValidationError as e:
        raise config_error(e) from e
    # surfaces solver-level field errors before anything runs
    config.solver_config()
    config.forcing_spec()
    _ = config.grid_model
    return config


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path} ({e})") from e
    log.info(f"Loaded run config {path}")
    return load_config_text(text, source=str(path))
