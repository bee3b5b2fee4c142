from pydantic import ConfigDict, Field, model_validator

from app.sim.base.models import StepConfig


class KseConfig(StepConfig):
    """Rotational Kuramoto–Sivashinsky run on the 2D torus (fixed dt, ETD1)"""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    lambda_: float = Field(
        ..., alias="lambda", ge=0.0, description="Anti-diffusion parameter λ"
    )

    @model_validator(mode="after")
    def _fixed_step(self) -> "KseConfig":
        if self.dt is None:
            raise ValueError("the KSE solver needs a fixed dt")
        return self
