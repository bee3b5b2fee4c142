import logging

import numpy as np

from app.sim.base.errors import StructuralError
from app.sim.base.models import Trajectory
from app.sim.diagnostics.models_diagnostics import AbsorbingBounds
from app.sim.diagnostics.services.monitor_service import monitor_service
from app.sim.forcing.models_forcing import ForceField
from app.sim.forcing.services.norms_service import norm_service
from app.sim.spectral.models_spectral import Grid
from app.sim.spectral.services.spectral_service import SpectralService

log = logging.getLogger(__name__)


def force_values(f: ForceField | None, grid: Grid) -> np.ndarray | None:
    """Force array on the grid, or None when there is no (or a zero) force"""
    if f is None:
        return None
    if f.grid != grid:
        raise StructuralError(
            f"force grid n={f.grid.n}, dim={f.grid.dim} does not match the state grid"
        )
    return None if f.is_zero else f.values


def damped_bounds(
    u0: np.ndarray, force: np.ndarray | None, nu: float, gamma: float
) -> AbsorbingBounds | None:
    """Absorbing balls for a forced, damped, viscous run; None otherwise"""
    if force is None or gamma <= 0 or nu <= 0:
        return None
    return monitor_service.absorbing_ball_bounds(
        force,
        nu,
        gamma,
        radius_l2=norm_service.norm_l2(u0),
        radius_linf=norm_service.norm_linf(u0),
    )


def report_bounds(trajectory: Trajectory, bounds: AbsorbingBounds | None) -> None:
    if bounds is None:
        return
    for record in trajectory.records:
        if record.t >= bounds.t2 and record.rho0_margin < 0:
            log.warning(f"L2 absorbing ball violated at t={record.t:.6g}")
            break
    for record in trajectory.records:
        if record.t >= bounds.tinf and record.rhoinf_margin < 0:
            log.warning(f"Linf absorbing ball violated at t={record.t:.6g}")
            break


def resolved_start(u0: np.ndarray, ops: SpectralService, nu: float) -> np.ndarray:
    """Initial state of a viscous dealiased run, restricted to the 2/3 band"""
    if not nu or not ops.dealias:
        return u0
    start = ops.band_limit(u0)
    removed = norm_service.norm_l2(u0 - start)
    if removed > 0:
        log.info(f"Initial state cut to the 2/3 band, L2 removed {removed:.3e}")
    return start
