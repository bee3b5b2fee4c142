import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.sim.spectral.models_spectral import Grid


class ForcingSpec(BaseModel):
    """Seeded annulus body force with Grashof scaling"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(0, ge=0, lt=2**64, description="SplitMix64 seed")
    k_min: float = Field(0.5, ge=0.0, description="Inner annulus radius")
    k_max: float = Field(2.5, gt=0.0, description="Outer annulus radius")
    grashof: float = Field(..., gt=0.0, description="G = ‖f‖/(λ₁ν²)")
    nu: float = Field(..., gt=0.0, description="Viscosity used in the scaling")
    lambda1: float = Field(1.0, description="Smallest positive Laplacian eigenvalue")

    @field_validator("lambda1")
    @classmethod
    def _lambda1_on_torus(cls, value: float) -> float:
        if value != 1.0:
            raise ValueError("lambda1 is 1 on the 2π-periodic box")
        return value

    @model_validator(mode="after")
    def _annulus_ordered(self) -> "ForcingSpec":
        if not self.k_min < self.k_max:
            raise ValueError(f"k_min={self.k_min} must be below k_max={self.k_max}")
        return self

    @property
    def target_norm(self) -> float:
        return self.grashof * self.lambda1 * self.nu**2


class ForceField(BaseModel):
    """Time-independent body force sampled on a grid"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray = Field(..., description="Shape (dim,) + grid.shape")
    spec: ForcingSpec | None = Field(None, description="Provenance when generated")

    @classmethod
    def zeros(cls, grid: Grid) -> "ForceField":
        return cls(grid=grid, values=np.zeros((grid.dim,) + grid.shape))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)
