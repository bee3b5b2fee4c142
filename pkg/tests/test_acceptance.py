import math

import numpy as np
import pytest

from app.sim.diagnostics.models_diagnostics import SpectrumRecord
from app.sim.diagnostics.services.spectrum_service import spectrum_service
from app.sim.run.controllers_run import DIAGNOSTICS_FILE, EXIT_OK, RunController
from app.sim.spectral.models_spectral import Grid2
from app.sim.verify.controllers_verify import SUITES, VerifyController
from app.storage import csv_store

HEADLINE_CONFIG = """
# forced 2D run at desk scale
equation.name = rotburgers2d
equation.nu = 0.005
equation.gamma = 0
equation.t_end = 200
equation.cfl = 0.2
equation.diag_every = 100
equation.snapshot_every = 4000
equation.spectrum_every = 2000
grid.n = 256
forcing.kind = annulus
forcing.seed = 0
forcing.grashof = 20
initial.kind = zero
"""


@pytest.mark.slow
class TestVerificationSuites:
    """Test suite for the full verification runs"""

    @pytest.mark.parametrize("name", list(SUITES))
    def test_suite_passes(self, name):
        """Test every check in the named suite passes"""
        report = VerifyController.run_suite(name)
        failed = [check.name for check in report.checks if not check.passed]
        assert report.passed, f"{name} failed: {failed}"


@pytest.mark.slow
@pytest.mark.integration
class TestHeadlineRun:
    """Test suite for the desk-scale forced run driven from a config file"""

    def test_headline_config(self, write_config, tmp_path):
        """Test n=256, ν=0.005, G=20 reaches T=200 with resolved spectra"""
        out = tmp_path / "headline"
        config = write_config(f"{HEADLINE_CONFIG}output.dir = {out}\n")
        assert RunController.run_config(config) == EXIT_OK

        records = csv_store.read_diagnostics(out / DIAGNOSTICS_FILE)
        assert records[-1].t >= 200.0
        assert all(math.isfinite(r.l2) and math.isfinite(r.sup) for r in records)
        assert max(r.sup for r in records) < 1.0

        grid = Grid2(n=256)
        spectra = sorted((out / "spectra").glob("spectrum_*.csv"))
        assert spectra
        for path in spectra:
            rows = csv_store.read_spectrum(path)
            spectrum = SpectrumRecord(energy=np.array([e for _, e in rows]))
            assert spectrum_service.is_resolved(spectrum, grid)
        assert sorted((out / "snapshots").glob("snapshot_*.rbsn"))
