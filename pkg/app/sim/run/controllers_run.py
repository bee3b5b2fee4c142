import asyncio
import logging
from pathlib import Path

import numpy as np

from app.sim.base.errors import (
    ConfigError,
    DivergedStateError,
    DomainError,
    SnapshotFormatError,
    StructuralError,
)
from app.sim.base.models import Trajectory
from app.sim.forcing.models_forcing import ForceField
from app.sim.forcing.services.forcing_service import forcing_service
from app.sim.rotburgers2d.controllers_rotburgers2d import RotBurgers2DController
from app.sim.rotburgers3d.controllers_rotburgers3d import RotBurgers3DController
from app.sim.rotkse2d.controllers_rotkse2d import RotKse2DController
from app.sim.run.models_run import RunConfig, load_config
from app.sim.run.services.profile_service import profile_service
from app.sim.spectral.models_spectral import Grid
from app.storage import csv_store
from app.storage.snapshot_store import (
    Snapshot,
    read_force,
    read_snapshot,
    write_snapshot,
)
from utilities import envs

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2

DIAGNOSTICS_FILE = "diagnostics.csv"
SPECTRA_DIR = "spectra"
SNAPSHOTS_DIR = "snapshots"


class RunController:
    """Executes run configs and writes their diagnostics, spectra and snapshots"""

    @staticmethod
    def build_force(config: RunConfig, grid: Grid) -> ForceField | None:
        kind = config.forcing.kind
        if kind == "none":
            return None
        if kind == "annulus":
            return forcing_service.generate(config.forcing_spec(), grid)
        force = read_force(config.forcing.path)
        if force.grid != grid:
            raise ConfigError(
                f"force is on n={force.grid.n}, dim={force.grid.dim}, the run on "
                f"n={grid.n}, dim={grid.dim}",
                field="forcing.path",
            )
        return force

    @staticmethod
    def build_initial(config: RunConfig, grid: Grid) -> np.ndarray:
        initial = config.initial
        if initial.kind == "zero":
            return np.zeros((grid.dim,) + grid.shape)
        if initial.kind == "snapshot":
            snapshot = read_snapshot(initial.path)
            if snapshot.grid != grid or snapshot.components != grid.dim:
                raise ConfigError(
                    f"snapshot holds {snapshot.components} components on "
                    f"n={snapshot.grid.n}, dim={snapshot.grid.dim}",
                    field="initial.path",
                )
            return snapshot.values
        return profile_service.build(
            initial.profile,
            grid,
            amplitude=initial.amplitude,
            seed=initial.seed,
            k_max=initial.k_max,
            conserved=initial.conserved,
        )

    @staticmethod
    def simulate(config: RunConfig) -> Trajectory:
        grid = config.grid_model
        cfg = config.solver_config()
        u0 = RunController.build_initial(config, grid)
        force = RunController.build_force(config, grid)
        name = config.equation.name
        if name == "rotburgers2d":
            return RotBurgers2DController.simulate(u0, cfg, force)
        if name == "rotburgers3d":
            return RotBurgers3DController.simulate3(u0, cfg, force)
        return RotKse2DController.simulate_kse(u0, cfg)

    @staticmethod
    def write_outputs(
        config: RunConfig, trajectory: Trajectory, out_dir: Path
    ) -> None:
        eq = config.equation
        grid = trajectory.grid
        csv_store.write_diagnostics(
            out_dir / DIAGNOSTICS_FILE, trajectory.records, grid.dim
        )
        for spectrum in trajectory.spectra:
            csv_store.write_spectrum(
                out_dir / SPECTRA_DIR / f"spectrum_{spectrum.step:08d}.csv", spectrum
            )
        snapshots = zip(trajectory.steps, trajectory.times, trajectory.states)
        for step, t, state in snapshots:
            write_snapshot(
                out_dir / SNAPSHOTS_DIR / f"snapshot_{step:08d}.rbsn",
                Snapshot(
                    grid=grid,
                    values=state,
                    t=t,
                    nu=eq.nu,
                    gamma=eq.gamma,
                    lam=eq.lambda_ or 0.0,
                ),
            )
        log.info(
            f"Wrote {len(trajectory.records)} diagnostics rows, "
            f"{len(trajectory.spectra)} spectra and {len(trajectory.states)} "
            f"snapshots to {out_dir}"
        )

    @staticmethod
    def run_config(path: str | Path, subdir: str | None = None) -> int:
        """Run one config file; returns the process exit code"""
        try:
            config = load_config(path)
            out_dir = envs.resolve_output_dir(config.output.dir)
            if subdir:
                out_dir = out_dir / subdir
            trajectory = RunController.simulate(config)
            RunController.write_outputs(config, trajectory, out_dir)
            if trajectory.diverged:
                log.warning(
                    f"{path}: stopped at t={trajectory.diverged_at:.6g} "
                    f"({trajectory.diverged_reason})"
                )
                return EXIT_DIVERGED
            return EXIT_OK

        except (ConfigError, SnapshotFormatError, DomainError, StructuralError) as e:
            log.error(f"{path}: invalid configuration: {e}")
            return EXIT_CONFIG
        except DivergedStateError as e:
            log.error(f"{path}: diverged: {e}")
            return EXIT_DIVERGED

    @staticmethod
    async def run_sweep(paths: list[Path], concurrency: int) -> list[int]:
        """Run configs concurrently, each into <output.dir>/<config stem>/"""
        semaphore = asyncio.Semaphore(concurrency)

        async def run_one(path: Path) -> int:
            async with semaphore:
                return await asyncio.to_thread(
                    RunController.run_config, path, path.stem
                )

        return await asyncio.gather(*(run_one(p) for p in paths))

    @staticmethod
    def cmd_run(paths: list[str | Path]) -> int:
        paths = [Path(p) for p in paths]
        if len(paths) == 1:
            return RunController.run_config(paths[0])
        concurrency = envs.get_sweep_concurrency()
        log.info(f"Running a sweep of {len(paths)} configs, {concurrency} at a time")
        codes = asyncio.run(RunController.run_sweep(paths, concurrency))
        for path, code in zip(paths, codes):
            log.info(f"{path}: exit code {code}")
        return max(codes)
