import logging

import numpy as np

from app.sim.base.errors import DivergedStateError
from app.sim.rotburgers3d.models_rotburgers3d import Rhs3Variant
from app.sim.spectral.services.spectral_service import SpectralService

log = logging.getLogger(__name__)


class Rk4Service:
    """Classical RK4 on the Lamb form of 3D rotational Burgers.

    The viscous term acts on the whole lattice. With ν > 0 and dealiasing
    each step ends with a projection onto the 2/3 band.
    """

    def __init__(self, ops: SpectralService):
        self.ops = ops

    def rhs3(
        self,
        u: np.ndarray,
        nu: float = 0.0,
        f: np.ndarray | None = None,
        variant: Rhs3Variant = Rhs3Variant.ROTATIONAL,
        gamma: float = 0.0,
    ) -> np.ndarray:
        """−(∇×u)×u + νΔu − γu + f, or −ν∇×∇×u in place of νΔu for curl_curl"""
        ops = self.ops
        out = -ops.lamb3(u)
        if nu:
            U = ops.fft_forward(u)
            if variant is Rhs3Variant.ROTATIONAL:
                out += nu * ops.fft_inverse(ops.laplacian_hat(U))
            else:
                out -= nu * ops.fft_inverse(ops.curl_curl_hat(U))
        if gamma:
            out -= gamma * u
        if f is not None:
            out += f
        return out

    def rk4_step(
        self,
        u: np.ndarray,
        dt: float,
        nu: float = 0.0,
        f: np.ndarray | None = None,
        variant: Rhs3Variant = Rhs3Variant.ROTATIONAL,
        gamma: float = 0.0,
    ) -> np.ndarray:
        if dt <= 0:
            raise ValueError(f"time step must be positive, got {dt}")
        if not np.all(np.isfinite(u)):
            raise DivergedStateError("non-finite velocity entering an RK4 step")

        def rhs(v: np.ndarray) -> np.ndarray:
            return self.rhs3(v, nu=nu, f=f, variant=variant, gamma=gamma)

        k1 = rhs(u)
        k2 = rhs(u + 0.5 * dt * k1)
        k3 = rhs(u + 0.5 * dt * k2)
        k4 = rhs(u + dt * k3)
        out = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        # viscous iterates stay on the band the RK4 CFL limit covers
        return self.ops.band_limit(out) if nu else out

    def helicity(self, u: np.ndarray) -> float:
        """(u, ∇×u)_{L²}"""
        return self.ops.inner(u, self.ops.curl3(u))
