import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.sim.base.errors import ConfigError
from app.sim.diagnostics.models_diagnostics import DiagnosticsRecord, SpectrumRecord
from app.sim.spectral.models_spectral import Grid

log = logging.getLogger(__name__)

# Real-axis stability radii of the explicit integrators
EULER_STABILITY_RADIUS = 2.0
RK4_STABILITY_RADIUS = 2.785
DEFAULT_CFL = 0.2


class StepConfig(BaseModel):
    """Time stepping, cadence and guard settings shared by every solver"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    t_end: float = Field(..., gt=0.0, description="Final time")
    dt: float | None = Field(None, gt=0.0, description="Fixed time step")
    cfl: float | None = Field(
        None, gt=0.0, le=0.25, description="Viscous CFL safety factor c"
    )
    dealias: bool = Field(True, description="2/3-rule dealiasing of products")
    diag_every: int = Field(10, ge=1, description="Steps between diagnostics")
    snapshot_every: int = Field(1000, ge=1, description="Steps between snapshots")
    spectrum_every: int | None = Field(
        None, ge=1, description="Steps between spectra (default: snapshot cadence)"
    )
    guard: float = Field(1e6, gt=0.0, description="Divergence threshold on sup|u|")
    resolution_guard: float = Field(
        1.0, ge=0.0, description="Threshold on Δx·sup|∇u| (0 disables)"
    )

    @model_validator(mode="before")
    @classmethod
    def _default_policy(cls, data):
        if not isinstance(data, dict):
            return data
        if data.get("dt") is None and data.get("cfl") is None:
            return {**data, "cfl": DEFAULT_CFL}
        return data

    @model_validator(mode="after")
    def _one_policy(self) -> "StepConfig":
        if self.dt is not None and self.cfl is not None:
            raise ValueError("dt (fixed) and cfl (viscous) are mutually exclusive")
        return self

    def resolve_dt(
        self,
        grid: Grid,
        nu: float,
        stability_radius: float = EULER_STABILITY_RADIUS,
    ) -> float:
        """Step size for the configured policy on this grid"""
        if self.dt is not None:
            return self.dt
        if nu <= 0:
            raise ConfigError("viscous CFL policy requires nu > 0", field="cfl")
        limit = stable_cfl(grid, self.dealias, stability_radius)
        if self.cfl > limit:
            log.warning(
                f"CFL factor {self.cfl} exceeds {limit:.4f}; explicit diffusion "
                f"is unstable in the highest retained shell"
            )
        return self.cfl * grid.dx**2 / nu

    def step_count(self, dt: float) -> int:
        ratio = self.t_end / dt
        nearest = round(ratio)
        if nearest >= 1 and abs(ratio - nearest) <= 1e-9 * ratio:
            return int(nearest)
        return max(1, math.ceil(ratio))

    @property
    def spectrum_cadence(self) -> int:
        return self.spectrum_every or self.snapshot_every


class Trajectory(BaseModel):
    """Snapshots, diagnostics and spectra of one simulation"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: Grid
    dt: float = Field(..., gt=0.0)
    steps: list[int] = Field(default_factory=list, description="Snapshot steps")
    times: list[float] = Field(default_factory=list, description="Snapshot times")
    states: list[np.ndarray] = Field(default_factory=list)
    records: list[DiagnosticsRecord] = Field(default_factory=list)
    spectra: list[SpectrumRecord] = Field(default_factory=list)
    final_step: int = 0
    diverged: bool = False
    diverged_reason: str | None = None
    diverged_at: float | None = None

    def add_snapshot(self, step: int, t: float, u: np.ndarray) -> None:
        if self.steps and step <= self.steps[-1]:
            return
        self.steps.append(step)
        self.times.append(t)
        self.states.append(u.copy())

    @property
    def initial_state(self) -> np.ndarray:
        return self.states[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return self.times[-1]

    def state_at(self, t: float, atol: float = 1e-9) -> np.ndarray:
        """Snapshot at time t (must coincide with a stored snapshot)"""
        for time, state in zip(self.times, self.states):
            if abs(time - t) <= atol * max(1.0, abs(t)):
                return state
        raise ValueError(f"no snapshot stored at t={t}")


Trajectory2 = Trajectory
Trajectory3 = Trajectory


def stable_cfl(grid: Grid, dealias: bool, stability_radius: float) -> float:
    """Largest c with νΔt·|k|²_max inside the integrator's stability radius"""
    k_edge = grid.dealias_cutoff if dealias else grid.n // 2
    return stability_radius / (grid.dx**2 * grid.dim * k_edge**2)
