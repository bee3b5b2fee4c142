import logging

import numpy as np

from app.sim.base.driver import TimeLoop
from app.sim.base.errors import StructuralError
from app.sim.base.models import Trajectory
from app.sim.diagnostics.models_diagnostics import EnergyLaw
from app.sim.diagnostics.services.monitor_service import DiagnosticsMonitor
from app.sim.forcing.services.norms_service import infer_grid
from app.sim.rotkse2d.models_rotkse2d import KseConfig
from app.sim.rotkse2d.services.etd_service import EtdService
from app.sim.spectral.services.spectral_service import get_spectral_service

log = logging.getLogger(__name__)

BOUND_RTOL = 1e-6


class RotKse2DController:
    """Drives ETD1 for the unforced rotational KSE"""

    @staticmethod
    def simulate_kse(u0: np.ndarray, cfg: KseConfig) -> Trajectory:
        try:
            grid = infer_grid(u0)
            if grid.dim != 2 or u0.shape[0] != 2:
                raise StructuralError(f"expected a 2D vector field, got {u0.shape}")
            ops = get_spectral_service(grid, cfg.dealias)
            solver = EtdService(ops, cfg.lambda_)
            monitor = DiagnosticsMonitor(
                ops, law=EnergyLaw.KSE, kse_lambda=cfg.lambda_
            )
            name = f"rotkse2d[lambda={cfg.lambda_:g}]"
            loop = TimeLoop(grid, solver.etd1_step, monitor, cfg, cfg.dt, name)
            trajectory = loop.run(u0)
            RotKse2DController.report_bound(trajectory)
            return trajectory

        except Exception as e:
            log.error(f"Rotational KSE simulation failed: {e}")
            raise

    @staticmethod
    def bound_violations(trajectory: Trajectory, rtol: float = BOUND_RTOL) -> int:
        """Samples where ‖u‖² exceeds e^{λ²t}‖u₀‖² beyond rtol"""
        count = 0
        for record in trajectory.records:
            bound = record.kse_margin + record.energy
            if record.kse_margin < -rtol * bound:
                count += 1
        return count

    @staticmethod
    def report_bound(trajectory: Trajectory) -> None:
        violations = RotKse2DController.bound_violations(trajectory)
        if violations:
            log.warning(f"Gronwall energy bound violated at {violations} samples")
