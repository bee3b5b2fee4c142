import math

import numpy as np
import pytest

from app.sim.base.errors import DomainError, StructuralError
from app.sim.base.models import Trajectory
from app.sim.diagnostics.controllers_diagnostics import DiagnosticsController
from app.sim.diagnostics.models_diagnostics import record_columns
from app.sim.diagnostics.services.identity_service import identity_service
from app.sim.diagnostics.services.monitor_service import DiagnosticsMonitor
from app.sim.forcing.models_forcing import ForceField, ForcingSpec
from app.sim.forcing.services.forcing_service import forcing_service
from app.sim.rotburgers2d.controllers_rotburgers2d import RotBurgers2DController
from app.sim.rotburgers2d.models_rotburgers2d import SimConfig2
from app.sim.rotburgers3d.controllers_rotburgers3d import RotBurgers3DController
from app.sim.rotburgers3d.models_rotburgers3d import SimConfig3
from app.sim.spectral.services.spectral_service import SpectralService


class TestSpectrum:
    """Test suite for shell energy spectra"""

    def test_cosine_spectrum(self, grid2):
        """Test cos x puts E₁ = √2/2 in shell 1 and nothing elsewhere"""
        x, _ = grid2.mesh
        u = np.stack([np.cos(x), np.zeros(grid2.shape)])
        spectrum = DiagnosticsController.energy_spectrum(u)
        assert spectrum.energy.size == 16
        assert math.isclose(spectrum.energy[1], math.sqrt(2.0) / 2.0, rel_tol=1e-14)
        others = np.delete(spectrum.energy, 1)
        assert np.max(others) < 1e-15

    def test_resolved_field(self, grid2, smooth_field):
        """Test a low-mode field passes the resolution check"""
        assert DiagnosticsController.is_resolved(smooth_field(grid2, seed=1))

    def test_under_resolved_field(self, grid2, smooth_field):
        """Test energy near the dealias cutoff fails the resolution check"""
        u = smooth_field(grid2, seed=1, k_max=10.0)
        assert not DiagnosticsController.is_resolved(u)

    def test_record_columns(self):
        """Test the CSV column layout per dimension"""
        columns = record_columns(3)
        assert columns[:3] == ["step", "t", "l2"]
        assert "mean_3" in columns
        assert columns[-1] == "kse_margin"
        assert len(record_columns(2)) == len(columns) - 1


class TestMonitors:
    """Test suite for energy balance, max principle and mean drift"""

    def test_balance_needs_consecutive_samples(self, grid2, smooth_field):
        """Test sparse diagnostics raise DomainError"""
        cfg = SimConfig2(t_end=0.02, dt=0.005, nu=0.1, diag_every=2)
        u0 = smooth_field(grid2, 0, 3.0, 0.5)
        trajectory = RotBurgers2DController.simulate(u0, cfg)
        with pytest.raises(DomainError, match="missing samples"):
            DiagnosticsController.energy_balance_residual(trajectory, nu=0.1)

    def test_balance_single_sample(self, grid2):
        """Test a trajectory of one sample has zero residual"""
        cfg = SimConfig2(t_end=0.01, dt=0.01, diag_every=1)
        trajectory = RotBurgers2DController.simulate(np.zeros((2,) + grid2.shape), cfg)
        trajectory.records = trajectory.records[:1]
        assert DiagnosticsController.energy_balance_residual(trajectory, nu=0.0) == 0.0

    def test_balance_small_for_forced_run(self, grid2, smooth_field):
        """Test the forced viscous balance closes to O(Δt)"""
        force = forcing_service.generate(ForcingSpec(grashof=5.0, nu=0.1), grid2)
        u0 = smooth_field(grid2, seed=2, amplitude=0.5)
        cfg = SimConfig2(t_end=0.1, dt=1e-3, nu=0.1, gamma=0.2, diag_every=1)
        trajectory = RotBurgers2DController.simulate(u0, cfg, force)
        residual = DiagnosticsController.energy_balance_residual(
            trajectory, nu=0.1, f=force, gamma=0.2
        )
        assert residual < 1e-2 * trajectory.records[0].energy

    def test_gradient_norm_matches_laplacian(self, grid2):
        """Test grad_l2 uses the |k|² of the Laplacian, Nyquist modes included"""
        u = np.stack([np.cos(16 * grid2.mesh[0]), np.cos(3 * grid2.mesh[1])])
        ops = SpectralService(grid2, dealias=False, workers=1)
        record = DiagnosticsMonitor(ops).measure(0, 0.0, u)
        expected = -ops.inner(u, ops.laplacian(u))
        assert math.isclose(record.grad_l2**2, expected, rel_tol=1e-12)
        assert math.isclose(record.grad_l2**2, (512 + 18) * math.pi**2)

    def test_max_principle_inviscid(self, grid2, smooth_field):
        """Test sup|u| never grows without viscosity or forcing"""
        cfg = SimConfig2(t_end=0.05, dt=0.005, diag_every=1)
        trajectory = RotBurgers2DController.simulate(
            smooth_field(grid2, 3, 3.0, 0.5), cfg
        )
        assert DiagnosticsController.max_principle_monitor(trajectory) < 1e-12

    def test_max_principle_single_record(self, grid2):
        """Test a single record has nothing to compare"""
        trajectory = Trajectory(grid=grid2, dt=0.1)
        assert DiagnosticsController.max_principle_monitor(trajectory) == 0.0

    def test_mean_drift_damping(self, grid2):
        """Test a damped constant field drifts at exactly −γ"""
        u_now = np.stack([np.ones(grid2.shape), np.zeros(grid2.shape)])
        u_next = 0.95 * u_now
        residual = DiagnosticsController.mean_drift_residual(
            u_now, u_next, 0.1, gamma=0.5
        )
        assert residual < 1e-13

    def test_mean_drift_along_run(self, grid2, smooth_field):
        """Test the mean follows ((∇·u)u − γu + f) for one Euler step"""
        force = ForceField.zeros(grid2)
        force.values[0] = 0.3
        u0 = smooth_field(grid2, seed=4, amplitude=0.5)
        cfg = SimConfig2(
            t_end=1e-3, dt=1e-3, gamma=0.1, diag_every=1, snapshot_every=1
        )
        trajectory = RotBurgers2DController.simulate(u0, cfg, force)
        residual = DiagnosticsController.mean_drift_residual(
            trajectory.states[0], trajectory.states[1], 1e-3, f=force, gamma=0.1
        )
        assert residual < 1e-2


class TestAbsorbingBounds:
    """Test suite for absorbing-ball radii"""

    @pytest.fixture
    def force(self, grid2):
        """Seeded annulus force on the 32² grid"""
        return forcing_service.generate(ForcingSpec(seed=1, grashof=5.0, nu=0.1), grid2)

    def test_needs_damping(self, force):
        """Test γ = 0 has no absorbing ball"""
        with pytest.raises(DomainError):
            DiagnosticsController.absorbing_ball_bounds(force, nu=0.1, gamma=0.0)

    def test_doubling_gamma_halves_radii(self, force):
        """Test ρ₀ and ρ∞ scale as 1/γ"""
        a = DiagnosticsController.absorbing_ball_bounds(force, nu=0.1, gamma=0.5)
        b = DiagnosticsController.absorbing_ball_bounds(force, nu=0.1, gamma=1.0)
        assert math.isclose(b.rho0, a.rho0 / 2.0, rel_tol=1e-12)
        assert math.isclose(b.rhoinf, a.rhoinf / 2.0, rel_tol=1e-12)

    def test_entry_times(self, force, grid2):
        """Test entry times vanish from rest and grow with the initial radius"""
        at_rest = DiagnosticsController.absorbing_ball_bounds(force, 0.1, 0.5)
        assert at_rest.t2 == 0.0 and at_rest.tinf == 0.0
        x, _ = grid2.mesh
        u0 = np.stack([10.0 * np.cos(x), np.zeros(grid2.shape)])
        moving = DiagnosticsController.absorbing_ball_bounds(force, 0.1, 0.5, u0=u0)
        assert moving.t2 > 0.0
        assert moving.tinf > 0.0

    def test_zero_force_gives_zero_radii(self, grid2):
        """Test a zero force gives zero radii"""
        bounds = DiagnosticsController.absorbing_ball_bounds(
            ForceField.zeros(grid2), nu=0.1, gamma=0.5
        )
        assert bounds.rho0 == 0.0 and bounds.rhoinf == 0.0


class TestIdentities:
    """Test suite for the divergence and complex-form identities"""

    def test_divergence_source(self, grid3, smooth_field):
        """Test ∇·rhs equals the pointwise divergence source"""
        u = smooth_field(grid3, seed=6)
        force = forcing_service.generate(ForcingSpec(grashof=1.0, nu=0.1), grid3)
        assert DiagnosticsController.divergence_source_check(u) < 1e-9
        assert DiagnosticsController.divergence_source_check(u, 0.1, force) < 1e-9

    def test_divergence_source_is_3d(self, grid2, smooth_field):
        """Test the identity is refused on a 2D field"""
        with pytest.raises(StructuralError):
            identity_service.divergence_source_check(smooth_field(grid2))

    def test_divergence_dynamics_order(self, grid3, smooth_field):
        """Test the centered-difference residual converges at second order"""
        u0 = smooth_field(grid3, seed=7, k_max=2.0, amplitude=0.5)
        cfg = SimConfig3(t_end=0.1, dt=0.01, snapshot_every=1)
        trajectory = RotBurgers3DController.simulate3(u0, cfg)
        report = DiagnosticsController.divergence_dynamics_residual(trajectory)
        assert report.residual_fine < report.residual_coarse
        assert 1.6 <= report.order <= 2.4

    def test_divergence_dynamics_short_trajectory(self, grid3, smooth_field):
        """Test three snapshots give one spacing and no order"""
        cfg = SimConfig3(t_end=0.02, dt=0.01, snapshot_every=1)
        u0 = smooth_field(grid3, 1, 2.0, 0.5)
        trajectory = RotBurgers3DController.simulate3(u0, cfg)
        report = DiagnosticsController.divergence_dynamics_residual(trajectory)
        assert report.residual_coarse == report.residual_fine
        assert math.isnan(report.order)

    def test_divergence_dynamics_needs_snapshots(self, grid3, smooth_field):
        """Test fewer than three snapshots raise DomainError"""
        cfg = SimConfig3(t_end=0.01, dt=0.01, snapshot_every=1)
        u0 = smooth_field(grid3, 1, 2.0, 0.5)
        trajectory = RotBurgers3DController.simulate3(u0, cfg)
        with pytest.raises(DomainError):
            DiagnosticsController.divergence_dynamics_residual(trajectory)

    def test_complex_form_residual(self, grid2, smooth_field):
        """Test the complex-form residual is a finite measurement"""
        residual = DiagnosticsController.complex_form_residual(smooth_field(grid2, 8))
        assert math.isfinite(residual)
        assert residual >= 0.0
