from pydantic import Field

from app.sim.base.models import StepConfig


class SimConfig2(StepConfig):
    """2D rotational Burgers run with the exact-rotation Euler scheme"""

    nu: float = Field(0.0, ge=0.0, description="Viscosity")
    gamma: float = Field(0.0, ge=0.0, description="Linear damping")
