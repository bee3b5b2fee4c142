import numpy as np
import pytest

from app.sim.base.errors import ConfigError
from app.sim.forcing.models_forcing import ForcingSpec
from app.sim.forcing.services.forcing_service import forcing_service
from app.sim.rotburgers2d.models_rotburgers2d import SimConfig2
from app.sim.rotkse2d.models_rotkse2d import KseConfig
from app.sim.run.controllers_run import (
    DIAGNOSTICS_FILE,
    EXIT_CONFIG,
    EXIT_DIVERGED,
    EXIT_OK,
    RunController,
)
from app.sim.run.models_run import load_config_text, parse_config_text
from app.sim.run.services.profile_service import profile_service
from app.sim.spectral.models_spectral import Grid2, Grid3
from app.storage import csv_store
from app.storage.snapshot_store import read_snapshot, write_force

BASE_2D = """
# 2D taylor-green, two steps
equation.name = rotburgers2d
equation.nu = 0.1
equation.t_end = 0.02
equation.dt = 0.01
equation.diag_every = 1
equation.snapshot_every = 1
grid.n = 16
initial.kind = profile
initial.profile = taylor_green
initial.amplitude = 0.5
"""


def with_output(text: str, out) -> str:
    return f"{text}output.dir = {out}\n"


class TestConfigParsing:
    """Test suite for key=value run configs"""

    def test_sections_and_comments(self):
        """Test keys are grouped by section and comments dropped"""
        sections = parse_config_text("grid.n = 1  # trailing\n\n# whole line\n")
        assert sections == {"grid": {"n": "1"}}

    @pytest.mark.parametrize(
        "text, field",
        [
            ("sweep.n = 3", "sweep.n"),
            ("grid.n = 16\ngrid.n = 32", "grid.n"),
            ("grid.n =", "grid.n"),
            ("gridn = 16", "gridn"),
        ],
    )
    def test_malformed_lines(self, text, field):
        """Test unknown sections, duplicates, empty values and bare keys"""
        with pytest.raises(ConfigError) as excinfo:
            parse_config_text(text)
        assert excinfo.value.field == field

    def test_missing_equals(self):
        """Test a line without '=' is refused"""
        with pytest.raises(ConfigError, match="expected key=value"):
            parse_config_text("grid.n 16")

    def test_valid_config(self):
        """Test a full config builds the solver settings"""
        config = load_config_text(BASE_2D)
        assert config.dim == 2
        assert config.grid_model == Grid2(n=16)
        solver = config.solver_config()
        assert isinstance(solver, SimConfig2)
        assert solver.nu == 0.1 and solver.dt == 0.01
        assert config.forcing_spec() is None

    @pytest.mark.parametrize(
        "extra, field",
        [
            ("equation.viscosity = 0.1\n", "equation.viscosity"),
            ("equation.lambda = 1.0\n", "equation.lambda"),
            ("equation.cfl = 0.5\n", "equation.cfl"),
            ("forcing.kind = annulus\n", "forcing.grashof"),
            (
                "forcing.kind = file\nforcing.path = /no/such/force.rbsn\n",
                "forcing.path",
            ),
        ],
    )
    def test_invalid_keys(self, extra, field):
        """Test each invalid setting names its field"""
        with pytest.raises(ConfigError) as excinfo:
            load_config_text(BASE_2D + extra)
        assert excinfo.value.field == field

    def test_missing_grid(self):
        """Test a config without a grid section names it"""
        text = BASE_2D.replace("grid.n = 16\n", "")
        with pytest.raises(ConfigError) as excinfo:
            load_config_text(text)
        assert excinfo.value.field == "grid"

    def test_odd_grid(self):
        """Test an odd resolution is reported on grid.n"""
        with pytest.raises(ConfigError) as excinfo:
            load_config_text(BASE_2D.replace("grid.n = 16", "grid.n = 17"))
        assert excinfo.value.field == "grid.n"

    def test_kse_needs_lambda(self):
        """Test rotkse2d without λ is refused"""
        text = BASE_2D.replace("rotburgers2d", "rotkse2d")
        with pytest.raises(ConfigError) as excinfo:
            load_config_text(text)
        assert excinfo.value.field == "equation.lambda"

    def test_kse_config(self):
        """Test rotkse2d builds a KseConfig"""
        text = BASE_2D.replace("rotburgers2d", "rotkse2d") + "equation.lambda = 2\n"
        solver = load_config_text(text).solver_config()
        assert isinstance(solver, KseConfig)
        assert solver.lambda_ == 2.0

    def test_profile_dimension(self):
        """Test a 3D-only profile in a 2D run is refused"""
        text = BASE_2D.replace("taylor_green", "abc")
        with pytest.raises(ConfigError) as excinfo:
            load_config_text(text)
        assert excinfo.value.field == "initial.profile"


class TestProfileService:
    """Test suite for named initial fields"""

    def test_random_smooth_amplitude(self):
        """Test the seeded field is scaled to sup|u| = amplitude"""
        grid = Grid2(n=16)
        u = profile_service.build("random_smooth", grid, amplitude=0.7, seed=3)
        assert np.isclose(np.sqrt(np.max(np.sum(u * u, axis=0))), 0.7, rtol=1e-14)

    def test_unknown_profile(self):
        """Test unknown names raise ConfigError"""
        with pytest.raises(ConfigError):
            profile_service.build("vortex_ring", Grid2(n=16))

    def test_blowup3d_conserved_too_small(self):
        """Test c ≤ 2a² cannot define w₀"""
        with pytest.raises(ConfigError) as excinfo:
            profile_service.blowup3d(Grid3(n=8), amplitude=1.0, conserved=1.5)
        assert excinfo.value.field == "initial.conserved"

    def test_cos_mode(self):
        """Test cos_mode puts a·cos x in the first component only"""
        grid = Grid3(n=8)
        u = profile_service.cos_mode(grid, 0.1)
        assert np.allclose(u[0], 0.1 * np.cos(grid.mesh[0]))
        assert not np.any(u[1:])


class TestRunController:
    """Test suite for running config files"""

    def test_run_writes_outputs(self, write_config, tmp_path):
        """Test diagnostics, spectra and snapshots land in output.dir"""
        out = tmp_path / "out"
        code = RunController.run_config(write_config(with_output(BASE_2D, out)))
        assert code == EXIT_OK
        records = csv_store.read_diagnostics(out / DIAGNOSTICS_FILE)
        assert [r.step for r in records] == [0, 1, 2]
        assert (out / "spectra" / "spectrum_00000002.csv").is_file()
        snapshot = read_snapshot(out / "snapshots" / "snapshot_00000002.rbsn")
        assert np.isclose(snapshot.t, 0.02)
        assert snapshot.nu == 0.1

    def test_runs_are_deterministic(self, write_config, tmp_path):
        """Test two runs of one config write identical snapshots"""
        text = BASE_2D.replace("taylor_green", "random_smooth\ninitial.k_max = 2")
        for name in ("a", "b"):
            RunController.run_config(
                write_config(with_output(text, tmp_path / name), f"{name}.cfg")
            )
        snap = "snapshots/snapshot_00000002.rbsn"
        first, second = (tmp_path / name / snap for name in ("a", "b"))
        assert first.read_bytes() == second.read_bytes()

    def test_missing_config_file(self, tmp_path):
        """Test an unreadable config exits with the config code"""
        assert RunController.run_config(tmp_path / "absent.cfg") == EXIT_CONFIG

    def test_invalid_config_exits_1(self, write_config, tmp_path):
        """Test a config error exits 1 without writing outputs"""
        out = tmp_path / "out"
        text = with_output(BASE_2D.replace("grid.n = 16\n", ""), out)
        assert RunController.run_config(write_config(text)) == EXIT_CONFIG
        assert not out.exists()

    def test_divergence_exits_2(self, write_config, tmp_path):
        """Test a tripped guard exits 2 and still writes the last state"""
        out = tmp_path / "out"
        text = with_output(BASE_2D + "equation.guard = 0.1\n", out)
        assert RunController.run_config(write_config(text)) == EXIT_DIVERGED
        assert (out / DIAGNOSTICS_FILE).is_file()
        assert (out / "snapshots" / "snapshot_00000000.rbsn").is_file()

    def test_snapshot_initial_data(self, write_config, tmp_path):
        """Test a run can restart from its own snapshot"""
        first = tmp_path / "first"
        RunController.run_config(write_config(with_output(BASE_2D, first), "a.cfg"))
        snapshot = first / "snapshots" / "snapshot_00000002.rbsn"
        text = BASE_2D.replace(
            "initial.kind = profile\ninitial.profile = taylor_green\n"
            "initial.amplitude = 0.5\n",
            f"initial.kind = snapshot\ninitial.path = {snapshot}\n",
        )
        second = tmp_path / "second"
        config = write_config(with_output(text, second), "b.cfg")
        code = RunController.run_config(config)
        assert code == EXIT_OK
        restart = read_snapshot(second / "snapshots" / "snapshot_00000000.rbsn")
        assert np.array_equal(restart.values, read_snapshot(snapshot).values)

    def test_force_grid_mismatch(self, write_config, tmp_path):
        """Test a force stored on another grid exits 1"""
        force = forcing_service.generate(
            ForcingSpec(grashof=1.0, nu=0.1), Grid2(n=32)
        )
        path = write_force(tmp_path / "force.rbsn", force)
        text = BASE_2D + f"forcing.kind = file\nforcing.path = {path}\n"
        config = write_config(with_output(text, tmp_path / "o"))
        assert RunController.run_config(config) == EXIT_CONFIG

    def test_output_root(self, write_config, tmp_path, monkeypatch):
        """Test relative output dirs resolve under ROTBURGERS_OUTPUT_ROOT"""
        monkeypatch.setenv("ROTBURGERS_OUTPUT_ROOT", str(tmp_path / "root"))
        code = RunController.run_config(write_config(with_output(BASE_2D, "rel")))
        assert code == EXIT_OK
        assert (tmp_path / "root" / "rel" / DIAGNOSTICS_FILE).is_file()

    def test_sweep(self, write_config, tmp_path, monkeypatch):
        """Test a sweep runs each config into its own subdirectory"""
        monkeypatch.setenv("SWEEP_CONCURRENCY", "2")
        out = tmp_path / "sweep"
        good = write_config(with_output(BASE_2D, out), "good.cfg")
        bad = write_config(
            with_output(BASE_2D + "equation.guard = 0.1\n", out), "hot.cfg"
        )
        assert RunController.cmd_run([good, bad]) == EXIT_DIVERGED
        assert (out / "good" / DIAGNOSTICS_FILE).is_file()
        assert (out / "hot" / DIAGNOSTICS_FILE).is_file()
