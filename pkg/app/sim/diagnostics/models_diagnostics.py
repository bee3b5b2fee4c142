from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class EnergyLaw(str, Enum):
    """Which continuum energy rate the cumulative balance residual integrates"""

    ROTATIONAL = "rotational"
    CURL_CURL = "curl_curl"
    KSE = "kse"


class DiagnosticsRecord(BaseModel):
    """Norms, balances and bound margins at one time sample"""

    model_config = ConfigDict(frozen=True)

    step: int = Field(..., ge=0, description="Time-step index")
    t: float = Field(..., description="Simulation time")
    l2: float = Field(..., description="‖u‖_{L²}")
    grad_l2: float = Field(..., description="‖∇u‖_{L²}")
    div_l2: float = Field(..., description="‖∇·u‖_{L²}")
    curl_l2: float = Field(..., description="‖∇×u‖_{L²}")
    sup: float = Field(..., description="max_x |u(x)|")
    grad_sup: float = Field(..., description="max_x |∇u(x)| (Frobenius)")
    mean: tuple[float, ...] = Field(..., description="∫u dx / (2π)^d")
    helicity: float | None = Field(None, description="(u, ∇×u), 3D only")
    forcing_work: float = Field(0.0, description="(f, u)_{L²}")
    energy_residual: float = Field(
        0.0, description="‖u‖² − ‖u₀‖² − ∫ energy rate, trapezoid in time"
    )
    rho0_margin: float | None = Field(None, description="ρ₀ − ‖u‖²")
    rhoinf_margin: float | None = Field(None, description="ρ∞ − sup|u|")
    kse_margin: float | None = Field(None, description="e^{λ²t}‖u₀‖² − ‖u‖²")

    @property
    def energy(self) -> float:
        return self.l2**2


RECORD_SCALARS = (
    "step",
    "t",
    "l2",
    "grad_l2",
    "div_l2",
    "curl_l2",
    "sup",
    "grad_sup",
)
RECORD_TAIL = (
    "helicity",
    "forcing_work",
    "energy_residual",
    "rho0_margin",
    "rhoinf_margin",
    "kse_margin",
)


def record_columns(dim: int) -> list[str]:
    """CSV column names for records of the given dimension"""
    return [*RECORD_SCALARS, *(f"mean_{i + 1}" for i in range(dim)), *RECORD_TAIL]


class SpectrumRecord(BaseModel):
    """Shell energy spectrum E_k, k = 0 … n/2 − 1"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    energy: np.ndarray = Field(..., description="E_k per shell")
    step: int | None = Field(None, description="Time-step index when sampled")
    t: float | None = Field(None, description="Simulation time when sampled")

    @property
    def shells(self) -> np.ndarray:
        return np.arange(self.energy.size)


class AbsorbingBounds(BaseModel):
    """Absorbing-ball radii of the damped system and entry times for radius R"""

    rho0: float = Field(..., ge=0.0, description="L² ball radius (squared norm)")
    rhoinf: float = Field(..., ge=0.0, description="L∞ ball radius")
    t2: float = Field(..., ge=0.0, description="Entry time into the L² ball")
    tinf: float = Field(..., ge=0.0, description="Entry time into the L∞ ball")


class ConvergenceReport(BaseModel):
    """Residual measured at two resolutions and the observed order"""

    spacing: float = Field(..., description="Coarser of the two spacings")
    residual_coarse: float
    residual_fine: float
    order: float = Field(..., description="log2(coarse / fine)")
