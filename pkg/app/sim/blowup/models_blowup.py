import math
from collections.abc import Callable
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

ScalarFn = Callable[[np.ndarray], np.ndarray]

DERIVATIVE_TOL = 1e-6
CONSERVED_TOL = 1e-12
SETUP_SAMPLES = 1000


def _samples() -> np.ndarray:
    return np.linspace(-math.pi, math.pi, SETUP_SAMPLES, endpoint=False)


class Profile1D(BaseModel):
    """Smooth 2π-periodic profile together with its derivative"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = Field("profile", description="Label used in logs and reports")
    func: ScalarFn = Field(..., description="x ↦ u0(x), vectorised")
    derivative: ScalarFn = Field(..., description="x ↦ u0'(x), vectorised")

    @model_validator(mode="after")
    def _consistent(self) -> "Profile1D":
        x = _samples()
        with np.errstate(invalid="ignore"):
            values = self.func(x)
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.name} is not finite on [-pi, pi)")
        h = 1e-5
        fd = (self.func(x + h) - self.func(x - h)) / (2.0 * h)
        gap = float(np.max(np.abs(fd - self.derivative(x))))
        if gap > DERIVATIVE_TOL:
            raise ValueError(
                f"derivative of {self.name} disagrees with finite differences "
                f"by {gap:.3e}"
            )
        period_gap = float(np.max(np.abs(self.func(x + 2.0 * math.pi) - self.func(x))))
        if period_gap > 1e-12 * max(1.0, float(np.max(np.abs(self.func(x))))):
            raise ValueError(f"{self.name} is not 2π-periodic (gap {period_gap:.3e})")
        return self

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=np.float64))

    @classmethod
    def sine(cls, amplitude: float = 1.0) -> "Profile1D":
        return cls(
            name=f"{amplitude:g}*sin",
            func=lambda x: amplitude * np.sin(x),
            derivative=lambda x: amplitude * np.cos(x),
        )

    @classmethod
    def cosine(cls, amplitude: float = 1.0) -> "Profile1D":
        return cls(
            name=f"{amplitude:g}*cos",
            func=lambda x: amplitude * np.cos(x),
            derivative=lambda x: -amplitude * np.sin(x),
        )

    @classmethod
    def constant(cls, value: float) -> "Profile1D":
        return cls(
            name=f"const {value:g}",
            func=lambda x: np.full_like(np.asarray(x, dtype=np.float64), value),
            derivative=lambda x: np.zeros_like(np.asarray(x, dtype=np.float64)),
        )


class BlowupFamily3D(BaseModel):
    """x-only data (v₀, v₀, w₀) for 3D inviscid rotational Burgers.

    Solves the equation exactly when c = 2v₀² + w₀² is constant in space; w
    follows w = sign·√(2(v₀² − v²) + w₀²) along each characteristic.
    """

    model_config = ConfigDict(frozen=True)

    v0: Profile1D
    w0: Profile1D
    sign: Literal[1, -1] = 1
    require_conserved: bool = Field(
        True, description="Reject data whose 2v₀² + w₀² varies in space"
    )

    @model_validator(mode="after")
    def _admissible(self) -> "BlowupFamily3D":
        x = _samples()
        if float(np.min(np.abs(self.w0(x)))) <= 0.0:
            raise ValueError("w0 must be bounded away from zero")
        if np.any(np.sign(self.w0(x)) != self.sign):
            raise ValueError(f"w0 must lie on the sign={self.sign} branch")
        if self.require_conserved:
            spread = self.conserved_spread()
            if spread > CONSERVED_TOL * max(1.0, self.conserved_value()):
                raise ValueError(
                    f"2*v0^2 + w0^2 varies in space by {spread:.3e}; the family "
                    f"is not an exact solution"
                )
        return self

    def conserved(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * self.v0(x) ** 2 + self.w0(x) ** 2

    def conserved_value(self) -> float:
        return float(np.mean(self.conserved(_samples())))

    def conserved_spread(self) -> float:
        c = self.conserved(_samples())
        return float(np.max(c) - np.min(c))

    @classmethod
    def from_conserved(
        cls, v0: Profile1D, c: float, sign: Literal[1, -1] = 1
    ) -> "BlowupFamily3D":
        """Family with w₀ = sign·√(c − 2v₀²), so 2v₀² + w₀² ≡ c"""

        def w(x):
            return sign * np.sqrt(c - 2.0 * v0(x) ** 2)

        def dw(x):
            return -2.0 * v0(x) * v0.derivative(np.asarray(x, dtype=np.float64)) / w(x)

        w0 = Profile1D(name=f"sqrt({c:g}-2*{v0.name}^2)", func=w, derivative=dw)
        return cls(v0=v0, w0=w0, sign=sign)
