import logging
from collections.abc import Callable

import numpy as np

from app.sim.base.errors import DivergedStateError
from app.sim.base.models import StepConfig, Trajectory
from app.sim.diagnostics.models_diagnostics import DiagnosticsRecord
from app.sim.diagnostics.services.monitor_service import DiagnosticsMonitor
from app.sim.diagnostics.services.spectrum_service import spectrum_service
from app.sim.spectral.models_spectral import Grid

log = logging.getLogger(__name__)

Stepper = Callable[[np.ndarray, float], np.ndarray]


class TimeLoop:
    """Sequential fixed-step driver shared by all solvers.

    Records diagnostics, spectra and snapshots on their cadences and at the
    final step. Stops early, keeping the last good state, when a step raises
    DivergedStateError, the state turns non-finite, sup|u| exceeds the guard,
    or Δx·sup|∇u| exceeds the resolution guard at a diagnostics sample.
    """

    def __init__(
        self,
        grid: Grid,
        step: Stepper,
        monitor: DiagnosticsMonitor,
        cfg: StepConfig,
        dt: float,
        name: str = "simulation",
    ):
        self.grid = grid
        self.step = step
        self.monitor = monitor
        self.cfg = cfg
        self.dt = dt
        self.name = name

    def run(self, u0: np.ndarray) -> Trajectory:
        cfg, dt = self.cfg, self.dt
        if not np.all(np.isfinite(u0)):
            raise DivergedStateError("initial state is not finite", t=0.0)

        n_steps = cfg.step_count(dt)
        log.info(
            f"Starting {self.name}: n={self.grid.n}, dt={dt:.6e}, steps={n_steps}, "
            f"t_end={n_steps * dt:.6g}"
        )

        trajectory = Trajectory(grid=self.grid, dt=dt)
        u = np.array(u0, dtype=np.float64, copy=True)
        self._sample(trajectory, 0, 0.0, u, force_all=True)

        for step in range(1, n_steps + 1):
            t = step * dt
            try:
                candidate = self.step(u, dt)
            except DivergedStateError as e:
                self._diverge(trajectory, step - 1, (step - 1) * dt, u, str(e))
                return trajectory

            reason = self._guard(candidate)
            if reason:
                self._diverge(trajectory, step - 1, (step - 1) * dt, u, reason)
                return trajectory
            u = candidate

            record = self._sample(trajectory, step, t, u, force_all=step == n_steps)
            if record is not None and self._under_resolved(record):
                self._diverge(
                    trajectory,
                    step,
                    t,
                    u,
                    f"gradient no longer resolved: dx*sup|grad u| = "
                    f"{self.grid.dx * record.grad_sup:.3f}",
                )
                return trajectory

        trajectory.final_step = n_steps
        log.info(f"Finished {self.name} at t={n_steps * dt:.6g}")
        return trajectory

    def _sample(
        self,
        trajectory: Trajectory,
        step: int,
        t: float,
        u: np.ndarray,
        force_all: bool = False,
    ) -> DiagnosticsRecord | None:
        cfg = self.cfg
        record = None
        if force_all or step % cfg.diag_every == 0:
            record = self.monitor.measure(step, t, u)
            trajectory.records.append(record)
            log.debug(
                f"{self.name} step {step}: t={t:.6g} |u|={record.l2:.6e} "
                f"sup={record.sup:.6e}"
            )
        if force_all or step % cfg.spectrum_cadence == 0:
            trajectory.spectra.append(
                spectrum_service.energy_spectrum(u, self.grid, step=step, t=t)
            )
        if force_all or step % cfg.snapshot_every == 0:
            trajectory.add_snapshot(step, t, u)
        return record

    def _guard(self, u: np.ndarray) -> str | None:
        if not np.all(np.isfinite(u)):
            return "non-finite state"
        sup = float(np.sqrt(np.max(np.sum(u * u, axis=0))))
        if sup > self.cfg.guard:
            return f"sup|u| = {sup:.3e} exceeds guard {self.cfg.guard:.3e}"
        return None

    def _under_resolved(self, record: DiagnosticsRecord) -> bool:
        threshold = self.cfg.resolution_guard
        return threshold > 0 and self.grid.dx * record.grad_sup > threshold

    def _diverge(
        self, trajectory: Trajectory, step: int, t: float, u: np.ndarray, reason: str
    ) -> None:
        log.warning(f"{self.name} diverged after t={t:.6g}: {reason}")
        trajectory.diverged = True
        trajectory.diverged_reason = reason
        trajectory.diverged_at = t
        trajectory.final_step = step
        if not trajectory.records or trajectory.records[-1].step != step:
            trajectory.records.append(self.monitor.measure(step, t, u))
        trajectory.add_snapshot(step, t, u)
