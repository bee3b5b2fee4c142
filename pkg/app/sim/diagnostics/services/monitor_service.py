import logging
import math

import numpy as np
from scipy.integrate import trapezoid

from app.sim.base.errors import DomainError
from app.sim.diagnostics.models_diagnostics import (
    AbsorbingBounds,
    DiagnosticsRecord,
    EnergyLaw,
)
from app.sim.forcing.services.norms_service import norm_service
from app.sim.spectral.services.spectral_service import SpectralService

log = logging.getLogger(__name__)


class DiagnosticsMonitor:
    """Builds DiagnosticsRecords along one trajectory.

    Keeps the running trapezoid integral of the energy rate so that every
    record carries the cumulative energy-balance residual
    ‖u(t)‖² − ‖u₀‖² − ∫₀ᵗ r ds.
    """

    def __init__(
        self,
        ops: SpectralService,
        law: EnergyLaw = EnergyLaw.ROTATIONAL,
        nu: float = 0.0,
        gamma: float = 0.0,
        force: np.ndarray | None = None,
        kse_lambda: float | None = None,
        bounds: AbsorbingBounds | None = None,
    ):
        self.ops = ops
        self.grid = ops.grid
        self.law = law
        self.nu = nu
        self.gamma = gamma
        self.force = force
        self.kse_lambda = kse_lambda
        self.bounds = bounds
        self._energy0: float | None = None
        self._last: tuple[float, float] | None = None
        self._integral = 0.0

    def measure(self, step: int, t: float, u: np.ndarray) -> DiagnosticsRecord:
        ops, grid = self.ops, self.grid
        U = ops.fft_forward(u)
        weights = grid.half_weights * grid.box_volume

        energy = float(np.sum(weights * np.abs(U) ** 2))
        # |k|² of laplacian_hat, Nyquist modes included
        grad2 = float(np.sum(weights * grid.k2 * np.abs(U) ** 2))
        div_hat = ops.div_hat(U)
        div2 = float(np.sum(weights * np.abs(div_hat) ** 2))
        if grid.dim == 2:
            curl_hat = ops.curl2_hat(U)
        else:
            curl_hat = ops.curl3_hat(U)
        curl2 = float(np.sum(weights * np.abs(curl_hat) ** 2))

        jac = np.stack(
            [ops.fft_inverse(ops.gradient_hat(U[i])) for i in range(grid.dim)]
        )
        grad_sup = float(np.sqrt(np.max(np.sum(jac**2, axis=(0, 1)))))

        helicity = None
        if grid.dim == 3:
            helicity = ops.inner(u, ops.fft_inverse(curl_hat))

        forcing_work = ops.inner(self.force, u) if self.force is not None else 0.0
        rate = self._energy_rate(U, energy, grad2, div2, forcing_work)

        if self._energy0 is None:
            self._energy0 = energy
        if self._last is not None:
            t_prev, rate_prev = self._last
            self._integral += 0.5 * (t - t_prev) * (rate + rate_prev)
        self._last = (t, rate)
        residual = energy - self._energy0 - self._integral

        sup = norm_service.norm_linf(u, grid)
        rho0_margin = rhoinf_margin = kse_margin = None
        if self.bounds is not None:
            rho0_margin = self.bounds.rho0 - energy
            rhoinf_margin = self.bounds.rhoinf - sup
        if self.kse_lambda is not None:
            kse_margin = math.exp(self.kse_lambda**2 * t) * self._energy0 - energy

        return DiagnosticsRecord(
            step=step,
            t=t,
            l2=math.sqrt(energy),
            grad_l2=math.sqrt(grad2),
            div_l2=math.sqrt(div2),
            curl_l2=math.sqrt(curl2),
            sup=sup,
            grad_sup=grad_sup,
            mean=tuple(
                float(U[(i,) + (0,) * grid.dim].real) for i in range(grid.dim)
            ),
            helicity=helicity,
            forcing_work=forcing_work,
            energy_residual=residual,
            rho0_margin=rho0_margin,
            rhoinf_margin=rhoinf_margin,
            kse_margin=kse_margin,
        )

    def _energy_rate(
        self,
        U: np.ndarray,
        energy: float,
        grad2: float,
        div2: float,
        forcing_work: float,
    ) -> float:
        """d/dt ‖u‖² predicted by the continuum equation"""
        if self.law is EnergyLaw.KSE:
            sigma = self.kse_lambda * self.grid.k2 - self.grid.k2**2
            weights = self.grid.half_weights * self.grid.box_volume
            return 2.0 * float(np.sum(weights * sigma * np.abs(U) ** 2))
        # (∇×∇×u, u) = ‖∇u‖² − ‖∇·u‖² with the Nyquist modes diffused
        dissipation = grad2 if self.law is EnergyLaw.ROTATIONAL else grad2 - div2
        return (
            -2.0 * self.nu * dissipation
            - 2.0 * self.gamma * energy
            + 2.0 * forcing_work
        )


class MonitorService:
    """Theorem monitors evaluated on finished trajectories"""

    def energy_balance_residual(
        self,
        records: list[DiagnosticsRecord],
        nu: float,
        forced: bool = True,
        gamma: float = 0.0,
    ) -> float:
        """|‖u(T)‖² + 2ν∫‖∇u‖² + 2γ∫‖u‖² − ‖u₀‖² − 2∫(f,u)|, trapezoid in time.

        The forcing work comes from the records; records must be consecutive
        steps.
        """
        if not records:
            raise DomainError("energy balance needs at least one diagnostics sample")
        steps = np.array([r.step for r in records])
        if records[0].step != 0 or np.any(np.diff(steps) != 1):
            raise DomainError(
                "energy balance needs diagnostics at every step from t=0 "
                "(missing samples)"
            )
        t = np.array([r.t for r in records])
        energy = np.array([r.energy for r in records])
        grad2 = np.array([r.grad_l2**2 for r in records])
        work = np.array([r.forcing_work for r in records]) if forced else 0.0 * t
        if len(records) == 1:
            return 0.0
        sink = trapezoid(2.0 * nu * grad2 + 2.0 * gamma * energy, t)
        source = trapezoid(2.0 * work, t)
        return float(abs(energy[-1] + sink - energy[0] - source))

    def max_principle_monitor(
        self,
        records: list[DiagnosticsRecord],
        f_sup: float = 0.0,
        gamma: float = 0.0,
    ) -> float:
        """Worst increase of sup|u| beyond the forcing allowance between samples.

        Each interval contributes sup|u(t₊)| − e^{−γΔt} sup|u(t₋)| − Δt‖f‖∞.
        """
        worst = -math.inf
        for before, after in zip(records, records[1:]):
            dt = after.t - before.t
            excess = after.sup - math.exp(-gamma * dt) * before.sup - dt * f_sup
            worst = max(worst, excess)
        return worst if worst > -math.inf else 0.0

    def absorbing_ball_bounds(
        self,
        f: np.ndarray,
        nu: float,
        gamma: float,
        radius_l2: float = 0.0,
        radius_linf: float | None = None,
    ) -> AbsorbingBounds:
        """Absorbing radii ρ₀, ρ∞ and the entry times from initial radii R.

        t₂(R) = −(1/2γ) log min{1, ‖f‖²_{H⁻¹}/(2νγR²)}
        t∞(R) = −(1/γ) log min{1, ‖f‖_∞/(2γR)}
        """
        if gamma <= 0:
            raise DomainError("absorbing balls need damping gamma > 0")
        if nu <= 0:
            raise DomainError("absorbing balls need viscosity nu > 0")
        radius_linf = radius_l2 if radius_linf is None else radius_linf
        h = norm_service.norm_hminus1(f)
        f_sup = norm_service.norm_linf(f)
        rho0 = 5.0 * h**2 / (2.0 * nu * gamma)
        rhoinf = 3.0 * f_sup / (2.0 * gamma)

        def entry_time(numerator: float, denominator: float, rate: float) -> float:
            if numerator == 0.0 or denominator == 0.0:
                return 0.0
            return -math.log(min(1.0, numerator / denominator)) / rate

        t2 = entry_time(h**2, 2.0 * nu * gamma * radius_l2**2, 2.0 * gamma)
        tinf = entry_time(f_sup, 2.0 * gamma * radius_linf, gamma)
        log.info(
            f"Absorbing balls: rho0={rho0:.6e} (t2={t2:.4f}), "
            f"rhoinf={rhoinf:.6e} (tinf={tinf:.4f})"
        )
        return AbsorbingBounds(rho0=rho0, rhoinf=rhoinf, t2=t2, tinf=tinf)

    def mean_drift_residual(
        self,
        ops: SpectralService,
        u_now: np.ndarray,
        u_next: np.ndarray,
        dt: float,
        f: np.ndarray | None = None,
        gamma: float = 0.0,
    ) -> float:
        """|Δmean/Δt − (2π)^{-d}∫((∇·u)u − γu + f)dx|, max over components"""
        grid = ops.grid
        mean_now = u_now.reshape(grid.dim, -1).mean(axis=1)
        mean_next = u_next.reshape(grid.dim, -1).mean(axis=1)
        source = ops.div(u_now) * u_now - gamma * u_now
        if f is not None:
            source = source + f
        predicted = source.reshape(grid.dim, -1).mean(axis=1)
        return float(np.max(np.abs((mean_next - mean_now) / dt - predicted)))


monitor_service = MonitorService()
