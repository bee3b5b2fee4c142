import logging

import numpy as np

from app.sim.base.errors import DivergedStateError
from app.sim.spectral.services.spectral_service import SpectralService

log = logging.getLogger(__name__)


def rotate(v: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Apply R(θ) = [[cos θ, sin θ], [−sin θ, cos θ]] pointwise"""
    c = np.cos(theta)
    s = np.sin(theta)
    return np.stack([c * v[0] + s * v[1], -s * v[0] + c * v[1]])


class RotationService:
    """Exact-rotation Euler scheme for 2D rotational Burgers.

    u^{n+1} = R(Δt ωⁿ)[uⁿ + Δt(νΔuⁿ − γuⁿ + f)]

    ωⁿ is the vorticity of uⁿ, 2/3-truncated when the operators dealias. The
    rotation itself acts pointwise on the untruncated bracket. Diffusion acts
    on every lattice mode; with ν > 0 and dealiasing the new iterate is
    projected back onto the 2/3 band, the band the viscous CFL limit covers.
    Inviscid steps are never projected, so |u| is carried exactly.
    """

    def __init__(self, ops: SpectralService):
        self.ops = ops

    def angle_rate(self, u: np.ndarray) -> np.ndarray:
        return self.ops.curl2(u, dealias=self.ops.dealias)

    def step_inviscid(self, u: np.ndarray, dt: float) -> np.ndarray:
        return self.step_viscous(u, dt)

    def step_viscous(
        self,
        u: np.ndarray,
        dt: float,
        nu: float = 0.0,
        gamma: float = 0.0,
        f: np.ndarray | None = None,
    ) -> np.ndarray:
        if dt <= 0:
            raise ValueError(f"time step must be positive, got {dt}")
        if not np.all(np.isfinite(u)):
            raise DivergedStateError("non-finite velocity entering a rotation step")

        U = self.ops.fft_forward(u)
        omega = self.ops.fft_inverse(self.ops.truncate(self.ops.curl2_hat(U)))

        bracket = u
        if nu:
            lap = self.ops.fft_inverse(self.ops.laplacian_hat(U))
            bracket = bracket + dt * nu * lap
        if gamma:
            bracket = bracket - dt * gamma * u
        if f is not None:
            bracket = bracket + dt * f
        rotated = rotate(bracket, dt * omega)
        if nu:
            return self.ops.band_limit(rotated)
        return rotated

    def rotation_representation_check(
        self, u0: np.ndarray, states: list[np.ndarray], dt: float
    ) -> float:
        """Max-norm gap between u(t) and R(θ(t))u₀ with θ = Σ Δt ωⁿ.

        states holds the consecutive inviscid iterates u¹…uᵐ (every step).
        """
        theta = np.zeros(self.ops.grid.shape)
        previous = u0
        for state in states:
            theta = theta + dt * self.angle_rate(previous)
            previous = state
        if not states:
            return 0.0
        predicted = rotate(u0, theta)
        return float(np.max(np.abs(predicted - states[-1])))
