import logging

import numpy as np

from app.sim.base.errors import DivergedStateError
from app.sim.spectral.services.spectral_service import SpectralService

log = logging.getLogger(__name__)

PHI1_SERIES_THRESHOLD = 1e-4


def linear_symbol(k, lam: float):
    """σ(k) = λ|k|² − |k|⁴ for wavenumber magnitude |k|"""
    k2 = np.asarray(k, dtype=np.float64) ** 2
    return lam * k2 - k2**2


def phi1(z):
    """(e^z − 1)/z, by its Taylor series for |z| < 1e−4"""
    z = np.asarray(z, dtype=np.float64)
    small = np.abs(z) < PHI1_SERIES_THRESHOLD
    safe = np.where(small, 1.0, z)
    direct = np.expm1(safe) / safe
    series = 1.0 + z * (
        1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)))
    )
    return np.where(small, series, direct)


class EtdService:
    """First-order exponential time differencing for the rotational KSE.

    û ← e^{σΔt} û + Δt φ₁(σΔt) N̂(u), N(u) = −(∇×u)×u
    """

    def __init__(self, ops: SpectralService, lam: float):
        self.ops = ops
        self.lam = lam
        self.sigma = linear_symbol(ops.grid.kmag, lam)
        self._coefficients: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def coefficients(self, dt: float) -> tuple[np.ndarray, np.ndarray]:
        if dt not in self._coefficients:
            z = self.sigma * dt
            self._coefficients[dt] = (np.exp(z), dt * phi1(z))
        return self._coefficients[dt]

    def etd1_step(self, u: np.ndarray, dt: float, nonlinear: bool = True) -> np.ndarray:
        if dt <= 0:
            raise ValueError(f"time step must be positive, got {dt}")
        if not np.all(np.isfinite(u)):
            raise DivergedStateError("non-finite velocity entering an ETD1 step")
        growth, weight = self.coefficients(dt)
        U = growth * self.ops.fft_forward(u)
        if nonlinear:
            U = U + weight * self.ops.fft_forward(-self.ops.lamb2(u))
        return self.ops.fft_inverse(U)
