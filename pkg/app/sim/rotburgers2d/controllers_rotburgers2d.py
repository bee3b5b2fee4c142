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
from app.sim.base.models import Trajectory
from app.sim.diagnostics.models_diagnostics import EnergyLaw
from app.sim.diagnostics.services.monitor_service import DiagnosticsMonitor
from app.sim.forcing.models_forcing import ForceField
from app.sim.forcing.services.norms_service import infer_grid
from app.sim.rotburgers2d.models_rotburgers2d import SimConfig2
from app.sim.rotburgers2d.services.rotation_service import RotationService
from app.sim.spectral.services.spectral_service import get_spectral_service

log = logging.getLogger(__name__)


class RotBurgers2DController:
    """Drives the exact-rotation scheme for 2D rotational Burgers"""

    @staticmethod
    def simulate(
        u0: np.ndarray, cfg: SimConfig2, f: ForceField | None = None
    ) -> Trajectory:
        """Advance u0 to cfg.t_end, recording diagnostics, spectra and snapshots"""
        try:
            grid = infer_grid(u0)
            if grid.dim != 2 or u0.shape[0] != 2:
                raise StructuralError(f"expected a 2D vector field, got {u0.shape}")
            force = force_values(f, grid)
            dt = cfg.resolve_dt(grid, cfg.nu)
            ops = get_spectral_service(grid, cfg.dealias)
            u0 = resolved_start(u0, ops, cfg.nu)
            scheme = RotationService(ops)
            bounds = damped_bounds(u0, force, cfg.nu, cfg.gamma)
            monitor = DiagnosticsMonitor(
                ops,
                law=EnergyLaw.ROTATIONAL,
                nu=cfg.nu,
                gamma=cfg.gamma,
                force=force,
                bounds=bounds,
            )

            def step(u: np.ndarray, h: float) -> np.ndarray:
                return scheme.step_viscous(u, h, cfg.nu, cfg.gamma, force)

            trajectory = TimeLoop(grid, step, monitor, cfg, dt, "rotburgers2d").run(u0)
            report_bounds(trajectory, bounds)
            return trajectory

        except Exception as e:
            log.error(f"2D rotational Burgers simulation failed: {e}")
            raise

    @staticmethod
    def rotation_representation_check(
        u0: np.ndarray, t: float, trajectory: Trajectory, dealias: bool = True
    ) -> float:
        """Residual of u(t) = R(θ(t))u₀ with θ accumulated as Σ Δt ωⁿ.

        The trajectory must hold a snapshot at every step up to t.
        """
        steps = np.array(trajectory.steps)
        upto = [i for i, time in enumerate(trajectory.times) if time <= t * (1 + 1e-12)]
        if np.any(np.diff(steps[: len(upto)]) != 1) or steps[0] != 0:
            raise ValueError("rotation check needs snapshots at every step")
        ops = get_spectral_service(trajectory.grid, dealias)
        states = [trajectory.states[i] for i in upto[1:]]
        return RotationService(ops).rotation_representation_check(
            u0, states, trajectory.dt
        )
