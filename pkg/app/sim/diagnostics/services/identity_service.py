import logging
import math

import numpy as np

from app.sim.base.errors import DomainError, StructuralError
from app.sim.base.models import Trajectory
from app.sim.diagnostics.models_diagnostics import ConvergenceReport
from app.sim.forcing.services.norms_service import infer_grid
from app.sim.rotburgers3d.services.rk4_service import Rk4Service
from app.sim.spectral.services.spectral_service import (
    SpectralService,
    get_spectral_service,
)

log = logging.getLogger(__name__)

SPACING_RTOL = 1e-9


class IdentityService:
    """Pointwise identities satisfied by smooth rotational Burgers flows"""

    def divergence_source(self, ops: SpectralService, u: np.ndarray) -> np.ndarray:
        """−(u·∇)D + |ω|² − |∇u|² + ½Δ|u|² for D = ∇·u, 3D.

        Factors are 2/3-truncated and every product is truncated again, so on
        band-limited data this equals −∇·lamb3(u) to rounding.
        """
        grid = ops.grid
        U = ops.truncate(ops.fft_forward(u))
        ut = ops.fft_inverse(U)
        D_hat = ops.div_hat(U)
        grad_D = ops.fft_inverse(ops.gradient_hat(D_hat))
        omega = ops.fft_inverse(ops.curl3_hat(U))
        jac = np.stack([ops.fft_inverse(ops.gradient_hat(U[i])) for i in range(3)])

        pointwise = (
            -np.sum(ut * grad_D, axis=0)
            + np.sum(omega * omega, axis=0)
            - np.sum(jac * jac, axis=(0, 1))
        )
        S = ops.truncate(ops.fft_forward(pointwise))
        S = S + ops.truncate(-0.5 * grid.k2 * ops.fft_forward(np.sum(ut * ut, axis=0)))
        return ops.fft_inverse(S)

    def divergence_source_check(
        self,
        u: np.ndarray,
        nu: float = 0.0,
        f: np.ndarray | None = None,
        ops: SpectralService | None = None,
    ) -> float:
        """max|∇·rhs3(u) − (source + νΔD + ∇·f)|"""
        ops = ops or get_spectral_service(infer_grid(u))
        if ops.grid.dim != 3:
            raise StructuralError("the divergence identity is checked in 3D")
        rhs_div = ops.div(Rk4Service(ops).rhs3(u, nu=nu, f=f))
        expected = self.divergence_source(ops, u)
        if nu:
            D_hat = ops.div_hat(ops.truncate(ops.fft_forward(u)))
            expected = expected + nu * ops.fft_inverse(-ops.grid.k2 * D_hat)
        if f is not None:
            expected = expected + ops.div(f)
        return float(np.max(np.abs(rhs_div - expected)))

    def divergence_dynamics_residual(
        self, trajectory: Trajectory, dealias: bool = True
    ) -> ConvergenceReport:
        """Centered-difference residual of the divergence equation.

        Evaluated at the middle snapshot with neighbours one and two snapshots
        away. With only three or four snapshots the single available spacing
        is reported twice and the order is NaN.
        """
        count = len(trajectory.states)
        if count < 3:
            raise DomainError(
                f"divergence dynamics needs at least 3 snapshots, got {count}"
            )
        times = np.asarray(trajectory.times)
        gaps = np.diff(times)
        if np.any(np.abs(gaps - gaps[0]) > SPACING_RTOL * gaps[0]):
            raise DomainError("divergence dynamics needs equally spaced snapshots")

        ops = get_spectral_service(trajectory.grid, dealias)
        h = float(gaps[0])
        middle = count // 2

        def residual(spacing: int) -> float:
            before = trajectory.states[middle - spacing]
            after = trajectory.states[middle + spacing]
            dD_dt = (ops.div(after) - ops.div(before)) / (2.0 * spacing * h)
            source = self.divergence_source(ops, trajectory.states[middle])
            return float(np.max(np.abs(dD_dt - source)))

        fine = residual(1)
        if count >= 5 and middle >= 2 and middle + 2 < count:
            coarse = residual(2)
            order = math.log2(coarse / fine) if fine > 0 and coarse > 0 else math.nan
            spacing = 2.0 * h
        else:
            coarse, order, spacing = fine, math.nan, h
        log.info(
            f"Divergence dynamics residual {fine:.3e} (spacing {h:g}), "
            f"{coarse:.3e} (spacing {spacing:g}), order {order:.2f}"
        )
        return ConvergenceReport(
            spacing=spacing,
            residual_coarse=coarse,
            residual_fine=fine,
            order=order,
        )

    def complex_form_residual(
        self, u: np.ndarray, ops: SpectralService | None = None
    ) -> float:
        """max|iψLψ − (−ω u⊥ as u₁ + iu₂)| with ψ = u₁ + iu₂, Lψ = ∂y u₁ + i∂x u₂"""
        ops = ops or get_spectral_service(infer_grid(u))
        if ops.grid.dim != 2 or u.shape[0] != 2:
            raise StructuralError(
                f"complex form needs a 2D vector field, got {u.shape}"
            )
        U = ops.fft_forward(u)
        psi = u[0] + 1j * u[1]
        L_psi = ops.fft_inverse(ops.deriv(U[0], 1)) + 1j * ops.fft_inverse(
            ops.deriv(U[1], 0)
        )
        candidate = 1j * psi * L_psi
        rhs = -ops.lamb2(u)
        return float(np.max(np.abs(candidate - (rhs[0] + 1j * rhs[1]))))


identity_service = IdentityService()
