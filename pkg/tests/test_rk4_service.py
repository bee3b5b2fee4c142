import math

import numpy as np
import pytest

from app.sim.base.errors import StructuralError
from app.sim.forcing.services.norms_service import norm_service
from app.sim.rotburgers3d.controllers_rotburgers3d import RotBurgers3DController
from app.sim.rotburgers3d.models_rotburgers3d import Rhs3Variant, SimConfig3
from app.sim.rotburgers3d.services.rk4_service import Rk4Service
from app.sim.run.services.profile_service import profile_service
from app.sim.spectral.models_spectral import Grid3
from app.sim.spectral.services.spectral_service import SpectralService
from tests.conftest import sup_gap


class TestRk4Service:
    """Test suite for the 3D right-hand side and RK4 step"""

    @pytest.fixture
    def solver(self, ops3):
        """Create an Rk4Service on the shared 16³ operators"""
        return Rk4Service(ops3)

    def test_abc_helicity(self, solver, grid3):
        """Test (u, ∇×u) = ‖u‖² = 3(2π)³ for the unit ABC flow"""
        u = profile_service.abc(grid3)
        assert math.isclose(solver.helicity(u), 3.0 * (2 * math.pi) ** 3, rel_tol=1e-12)

    def test_abc_is_inviscid_steady_state(self, solver, grid3):
        """Test a Beltrami field does not move without viscosity"""
        u = profile_service.abc(grid3)
        assert sup_gap(solver.rk4_step(u, 0.05), u) < 1e-13

    def test_variants_agree_on_solenoidal_fields(self, solver, grid3):
        """Test −ν∇×∇×u equals νΔu when ∇·u = 0"""
        u = profile_service.taylor_green(grid3)
        rotational = solver.rhs3(u, nu=0.1, variant=Rhs3Variant.ROTATIONAL)
        curl_curl = solver.rhs3(u, nu=0.1, variant=Rhs3Variant.CURL_CURL)
        assert sup_gap(rotational, curl_curl) < 1e-12

    def test_variants_differ_on_compressive_fields(self, solver, grid3):
        """Test the variants split on a gradient field"""
        x = grid3.mesh[0]
        u = np.stack([np.sin(x), np.zeros(grid3.shape), np.zeros(grid3.shape)])
        rotational = solver.rhs3(u, nu=0.1, variant=Rhs3Variant.ROTATIONAL)
        curl_curl = solver.rhs3(u, nu=0.1, variant=Rhs3Variant.CURL_CURL)
        assert sup_gap(rotational, curl_curl) > 0.09

    def test_heat_reduction(self, solver, grid3):
        """Test (sin x, 0, 0) decays as e^{−νt} sin x"""
        x = grid3.mesh[0]
        u = np.stack([np.sin(x), np.zeros(grid3.shape), np.zeros(grid3.shape)])
        nu, dt = 0.1, 0.01
        for _ in range(10):
            u = solver.rk4_step(u, dt, nu=nu)
        assert sup_gap(u[0], math.exp(-nu * 0.1) * np.sin(x)) < 1e-10
        assert np.max(np.abs(u[1:])) < 1e-14

    @pytest.mark.parametrize("k", [4, 6, 8])
    def test_diffusion_reaches_every_mode(self, k):
        """Test cos(kx)e₂ follows the RK4 heat factor without dealiasing"""
        grid = Grid3(n=16)
        solver = Rk4Service(SpectralService(grid, dealias=False, workers=1))
        u = np.zeros((3,) + grid.shape)
        u[1] = 1e-8 * np.cos(k * grid.mesh[0])
        a = 0.1 * 0.01 * k**2
        factor = 1 - a + a**2 / 2 - a**3 / 6 + a**4 / 24
        for variant in Rhs3Variant:
            nxt = solver.rk4_step(u, 0.1, nu=0.01, variant=variant)
            assert sup_gap(nxt, factor * u) < 1e-14

    def test_viscous_step_stays_on_band(self):
        """Test a dealiased viscous step keeps k = 4 and removes k = 6 on n = 16"""
        grid = Grid3(n=16)
        solver = Rk4Service(SpectralService(grid, dealias=True, workers=1))
        x = grid.mesh[0]
        low = np.zeros((3,) + grid.shape)
        low[1] = 1e-8 * np.cos(4 * x)
        high = np.zeros((3,) + grid.shape)
        high[1] = 1e-8 * np.cos(6 * x)
        nxt = solver.rk4_step(low + high, 0.1, nu=0.01)
        a = 0.016
        factor = 1 - a + a**2 / 2 - a**3 / 6 + a**4 / 24
        assert sup_gap(nxt, factor * low) < 1e-14

    def test_forcing_and_damping(self, solver, grid3):
        """Test a constant force against damping on a constant field"""
        u = np.zeros((3,) + grid3.shape)
        f = np.ones((3,) + grid3.shape)
        rhs = solver.rhs3(u + 1.0, f=f, gamma=2.0)
        assert np.allclose(rhs, -1.0)

    def test_nonpositive_dt(self, solver, grid3):
        """Test dt ≤ 0 raises ValueError"""
        with pytest.raises(ValueError):
            solver.rk4_step(np.zeros((3,) + grid3.shape), -0.1)


class TestRotBurgers3DController:
    """Test suite for 3D simulations"""

    def test_inviscid_smooth_run(self, grid3, smooth_field):
        """Test a short inviscid run keeps energy and helicity"""
        u0 = profile_service.abc(grid3, 0.5) + smooth_field(grid3, 8, 2.0, 0.05)
        cfg = SimConfig3(t_end=0.05, dt=0.005, diag_every=1)
        trajectory = RotBurgers3DController.simulate3(u0, cfg)

        assert not trajectory.diverged
        first, last = trajectory.records[0], trajectory.records[-1]
        assert abs(last.energy - first.energy) <= 1e-8 * first.energy
        assert abs(last.helicity - first.helicity) <= 1e-6 * abs(first.helicity)

    def test_viscous_cfl_run(self, grid3, smooth_field):
        """Test the viscous CFL policy and energy decay"""
        u0 = smooth_field(grid3, seed=9, k_max=2.0, amplitude=0.5)
        cfg = SimConfig3(
            t_end=0.05, cfl=0.1, nu=0.05, variant=Rhs3Variant.CURL_CURL
        )
        trajectory = RotBurgers3DController.simulate3(u0, cfg)
        assert math.isclose(trajectory.dt, 0.1 * grid3.dx**2 / 0.05)
        assert norm_service.norm_l2(trajectory.final_state) < norm_service.norm_l2(u0)

    def test_wrong_dimension(self, grid2):
        """Test a 2D field is refused"""
        cfg = SimConfig3(t_end=0.1, dt=0.01)
        with pytest.raises(StructuralError):
            RotBurgers3DController.simulate3(np.zeros((2,) + grid2.shape), cfg)

    def test_curl_curl_divergence_runs_away(self):
        """Test ‖∇·u‖ grows under curl_curl until the run is stopped"""
        grid = Grid3(n=32)
        x = grid.mesh[0]
        u0 = np.stack([np.cos(x), np.sin(x), np.zeros(grid.shape)])
        cfg = SimConfig3(
            t_end=1.5,
            dt=5e-3,
            nu=0.01,
            variant=Rhs3Variant.CURL_CURL,
            diag_every=5,
        )
        trajectory = RotBurgers3DController.simulate3(u0, cfg)

        assert trajectory.diverged
        assert trajectory.diverged_at < 1.5
        first, last = trajectory.records[0], trajectory.records[-1]
        assert last.div_l2 >= 1.2 * first.div_l2
        assert last.grad_sup > 4.0
