import logging

import numpy as np

from app.sim.base.controllers import (
    damped_bounds,
    force_values,
    report_bounds,
    resolved_start,
)
from app.sim.base.driver import TimeLoop
from app.sim.base.errors import StructuralError
from app.sim.base.models import RK4_STABILITY_RADIUS, Trajectory
from app.sim.diagnostics.models_diagnostics import EnergyLaw
from app.sim.diagnostics.services.monitor_service import DiagnosticsMonitor
from app.sim.forcing.models_forcing import ForceField
from app.sim.forcing.services.norms_service import infer_grid
from app.sim.rotburgers3d.models_rotburgers3d import Rhs3Variant, SimConfig3
from app.sim.rotburgers3d.services.rk4_service import Rk4Service
from app.sim.spectral.services.spectral_service import get_spectral_service

log = logging.getLogger(__name__)


class RotBurgers3DController:
    """Drives RK4 for 3D rotational Burgers (Lamb or curl-curl viscous form)"""

    @staticmethod
    def simulate3(
        u0: np.ndarray, cfg: SimConfig3, f: ForceField | None = None
    ) -> Trajectory:
        try:
            grid = infer_grid(u0)
            if grid.dim != 3 or u0.shape[0] != 3:
                raise StructuralError(f"expected a 3D vector field, got {u0.shape}")
            force = force_values(f, grid)
            dt = cfg.resolve_dt(grid, cfg.nu, stability_radius=RK4_STABILITY_RADIUS)
            ops = get_spectral_service(grid, cfg.dealias)
            u0 = resolved_start(u0, ops, cfg.nu)
            solver = Rk4Service(ops)
            law = (
                EnergyLaw.ROTATIONAL
                if cfg.variant is Rhs3Variant.ROTATIONAL
                else EnergyLaw.CURL_CURL
            )
            bounds = damped_bounds(u0, force, cfg.nu, cfg.gamma)
            monitor = DiagnosticsMonitor(
                ops, law=law, nu=cfg.nu, gamma=cfg.gamma, force=force, bounds=bounds
            )

            def step(u: np.ndarray, h: float) -> np.ndarray:
                return solver.rk4_step(u, h, cfg.nu, force, cfg.variant, cfg.gamma)

            name = f"rotburgers3d[{cfg.variant.value}]"
            trajectory = TimeLoop(grid, step, monitor, cfg, dt, name).run(u0)
            report_bounds(trajectory, bounds)
            return trajectory

        except Exception as e:
            log.error(f"3D rotational Burgers simulation failed: {e}")
            raise
