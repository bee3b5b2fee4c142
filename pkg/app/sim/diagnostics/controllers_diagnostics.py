import logging

import numpy as np

from app.sim.base.models import Trajectory
from app.sim.diagnostics.models_diagnostics import (
    AbsorbingBounds,
    ConvergenceReport,
    SpectrumRecord,
)
from app.sim.diagnostics.services.identity_service import identity_service
from app.sim.diagnostics.services.monitor_service import monitor_service
from app.sim.diagnostics.services.spectrum_service import spectrum_service
from app.sim.forcing.models_forcing import ForceField
from app.sim.forcing.services.norms_service import infer_grid, norm_service
from app.sim.spectral.services.spectral_service import get_spectral_service

log = logging.getLogger(__name__)


def _values(f: ForceField | np.ndarray | None) -> np.ndarray | None:
    if f is None:
        return None
    values = f.values if isinstance(f, ForceField) else f
    return values if np.any(values) else None


class DiagnosticsController:
    """Spectra, balances and theorem monitors on fields and finished runs"""

    @staticmethod
    def energy_spectrum(u: np.ndarray) -> SpectrumRecord:
        return spectrum_service.energy_spectrum(u, infer_grid(u))

    @staticmethod
    def is_resolved(u: np.ndarray) -> bool:
        grid = infer_grid(u)
        return spectrum_service.is_resolved(
            spectrum_service.energy_spectrum(u, grid), grid
        )

    @staticmethod
    def energy_balance_residual(
        trajectory: Trajectory,
        nu: float,
        f: ForceField | np.ndarray | None = None,
        gamma: float = 0.0,
    ) -> float:
        try:
            return monitor_service.energy_balance_residual(
                trajectory.records, nu, forced=_values(f) is not None, gamma=gamma
            )

        except Exception as e:
            log.error(f"Energy balance evaluation failed: {e}")
            raise

    @staticmethod
    def max_principle_monitor(
        trajectory: Trajectory,
        f: ForceField | np.ndarray | None = None,
        gamma: float = 0.0,
    ) -> float:
        force = _values(f)
        f_sup = norm_service.norm_linf(force) if force is not None else 0.0
        return monitor_service.max_principle_monitor(
            trajectory.records, f_sup=f_sup, gamma=gamma
        )

    @staticmethod
    def absorbing_ball_bounds(
        f: ForceField | np.ndarray,
        nu: float,
        gamma: float,
        u0: np.ndarray | None = None,
    ) -> AbsorbingBounds:
        """ρ₀, ρ∞ and, when u0 is given, the entry times from its radii"""
        try:
            values = f.values if isinstance(f, ForceField) else f
            radius_l2 = radius_linf = 0.0
            if u0 is not None:
                radius_l2 = norm_service.norm_l2(u0)
                radius_linf = norm_service.norm_linf(u0)
            return monitor_service.absorbing_ball_bounds(
                values, nu, gamma, radius_l2=radius_l2, radius_linf=radius_linf
            )

        except Exception as e:
            log.error(f"Absorbing ball bounds failed: {e}")
            raise

    @staticmethod
    def mean_drift_residual(
        u_now: np.ndarray,
        u_next: np.ndarray,
        dt: float,
        f: ForceField | np.ndarray | None = None,
        gamma: float = 0.0,
        dealias: bool = True,
    ) -> float:
        ops = get_spectral_service(infer_grid(u_now), dealias)
        return monitor_service.mean_drift_residual(
            ops, u_now, u_next, dt, f=_values(f), gamma=gamma
        )

    @staticmethod
    def divergence_dynamics_residual(trajectory: Trajectory) -> ConvergenceReport:
        try:
            return identity_service.divergence_dynamics_residual(trajectory)

        except Exception as e:
            log.error(f"Divergence dynamics check failed: {e}")
            raise

    @staticmethod
    def divergence_source_check(
        u: np.ndarray, nu: float = 0.0, f: ForceField | np.ndarray | None = None
    ) -> float:
        return identity_service.divergence_source_check(u, nu=nu, f=_values(f))

    @staticmethod
    def complex_form_residual(u: np.ndarray) -> float:
        residual = identity_service.complex_form_residual(u)
        log.info(f"Complex-form residual {residual:.6e}")
        return residual
