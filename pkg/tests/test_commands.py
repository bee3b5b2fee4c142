import numpy as np
import pytest
from click.testing import CliRunner

from app.commands import cli
from app.sim.spectral.models_spectral import Grid2
from app.sim.verify.controllers_verify import SUITES, VerifyController
from app.sim.verify.models_verify import CheckResult, SuiteReport
from app.storage.snapshot_store import Snapshot, read_force, write_snapshot


@pytest.fixture
def runner():
    return CliRunner()


class TestSpectrumCommand:
    """Test suite for `spectrum`"""

    def test_cosine_snapshot(self, runner, tmp_path):
        """Test the spectrum of cos x is printed as k,E_k CSV"""
        grid = Grid2(n=16)
        values = np.stack([np.cos(grid.mesh[0]), np.zeros(grid.shape)])
        snapshot = Snapshot(grid=grid, values=values)
        path = write_snapshot(tmp_path / "cos.rbsn", snapshot)

        result = runner.invoke(cli, ["spectrum", str(path)])

        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "k,E_k"
        assert len(lines) == 1 + 8
        k, energy = lines[2].split(",")
        assert k == "1"
        assert np.isclose(float(energy), np.sqrt(2.0) / 2.0, rtol=1e-14)

    def test_bad_snapshot(self, runner, tmp_path):
        """Test a corrupt file exits 1 with a message on stderr"""
        path = tmp_path / "bad.rbsn"
        path.write_bytes(b"not a snapshot " * 10)
        result = runner.invoke(cli, ["spectrum", str(path)])
        assert result.exit_code == 1
        assert "bad magic" in result.stderr


class TestForcingGenCommand:
    """Test suite for `forcing-gen`"""

    ARGS = ["--seed", "11", "--grashof", "20", "--nu", "0.05", "--n", "16"]

    def test_same_seed_same_bytes(self, runner, tmp_path):
        """Test one seed writes byte-identical files"""
        for name in ("a.rbsn", "b.rbsn"):
            result = runner.invoke(
                cli, ["forcing-gen", *self.ARGS, "--out", str(tmp_path / name)]
            )
            assert result.exit_code == 0
        first, second = (tmp_path / name for name in ("a.rbsn", "b.rbsn"))
        assert first.read_bytes() == second.read_bytes()
        force = read_force(tmp_path / "a.rbsn")
        assert force.values.shape == (2, 16, 16)

    def test_three_dimensional(self, runner, tmp_path):
        """Test --dim 3 writes a three-component force"""
        out = tmp_path / "f3.rbsn"
        result = runner.invoke(
            cli, ["forcing-gen", *self.ARGS, "--dim", "3", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert read_force(out).values.shape == (3, 16, 16, 16)

    @pytest.mark.parametrize(
        "override",
        [["--kmin", "0.1", "--kmax", "0.9"], ["--n", "15"], ["--nu", "0"]],
    )
    def test_invalid_parameters(self, runner, tmp_path, override):
        """Test empty annuli, odd grids and zero viscosity exit 1"""
        out = tmp_path / "f.rbsn"
        result = runner.invoke(
            cli, ["forcing-gen", *self.ARGS, *override, "--out", str(out)]
        )
        assert result.exit_code == 1
        assert result.stderr.startswith("error:")
        assert not out.exists()


class TestVerifyCommand:
    """Test suite for `verify`"""

    def test_unknown_suite(self, runner):
        """Test an unknown suite name exits 1"""
        result = runner.invoke(cli, ["verify", "everything"])
        assert result.exit_code == 1
        assert "unknown suite" in result.stderr

    def test_passing_suite(self, runner, mocker):
        """Test a passing suite prints its table and exits 0"""
        checks = [
            CheckResult.at_most("identity", 1e-14, 1e-12),
            CheckResult.within("ratio", 0.5, 0.4, 0.6),
            CheckResult.recorded("measured", 3.0),
        ]
        mocker.patch.dict(SUITES, {"core-identities": lambda: checks})

        result = runner.invoke(cli, ["verify", "core-identities"])

        assert result.exit_code == 0
        assert "identity" in result.stdout
        assert "recorded" in result.stdout
        assert result.stdout.splitlines()[-1].startswith("core-identities: PASS")

    def test_failing_suite(self, runner, mocker):
        """Test one failed check makes the suite exit 1"""
        checks = [CheckResult.at_most("drift", 1.0, 1e-12)]
        mocker.patch.dict(SUITES, {"kse": lambda: checks})
        result = runner.invoke(cli, ["verify", "kse"])
        assert result.exit_code == 1
        assert "FAIL" in result.stdout

    def test_format_table(self):
        """Test the table has a header, one row per check and a verdict"""
        report = SuiteReport(
            suite="blowup",
            checks=[CheckResult.holds("guard trips", True)],
            seconds=1.5,
        )
        lines = VerifyController.format_table(report)
        assert len(lines) == 3
        assert lines[1].endswith("PASS")
        assert lines[2] == "blowup: PASS (1.5s)"

    def test_run_suite_unknown(self):
        """Test run_suite refuses unknown names"""
        with pytest.raises(KeyError):
            VerifyController.run_suite("nope")


class TestRunCommand:
    """Test suite for `run`"""

    def test_exit_code_passthrough(self, runner, mocker, tmp_path):
        """Test the process exits with the controller's code"""
        run = mocker.patch("app.commands.RunController.cmd_run", return_value=2)
        config = tmp_path / "a.cfg"
        result = runner.invoke(cli, ["run", str(config)])
        assert result.exit_code == 2
        run.assert_called_once_with([config])

    def test_requires_config(self, runner):
        """Test at least one config is required"""
        result = runner.invoke(cli, ["run"])
        assert result.exit_code == 2

    @pytest.mark.integration
    def test_end_to_end(self, runner, tmp_path):
        """Test a small config runs to completion through the CLI"""
        config = tmp_path / "tiny.cfg"
        config.write_text(
            "equation.name = rotburgers3d\n"
            "equation.nu = 0.05\n"
            "equation.t_end = 0.02\n"
            "equation.dt = 0.01\n"
            "grid.n = 8\n"
            "initial.kind = profile\n"
            "initial.profile = abc\n"
            "initial.amplitude = 0.2\n"
            f"output.dir = {tmp_path / 'out'}\n"
        )
        result = runner.invoke(cli, ["run", str(config)])
        assert result.exit_code == 0
        assert (tmp_path / "out" / "diagnostics.csv").is_file()
