from enum import Enum

from pydantic import Field

from app.sim.base.models import StepConfig


class Rhs3Variant(str, Enum):
    """Viscous term of the 3D right-hand side"""

    ROTATIONAL = "rotational"  # νΔu
    CURL_CURL = "curl_curl"  # −ν∇×∇×u


class SimConfig3(StepConfig):
    """3D rotational Burgers run, always integrated with RK4"""

    nu: float = Field(0.0, ge=0.0, description="Viscosity")
    gamma: float = Field(0.0, ge=0.0, description="Linear damping")
    variant: Rhs3Variant = Field(Rhs3Variant.ROTATIONAL, description="RHS variant")
