import logging
import math
import time
from collections.abc import Callable

import numpy as np

from app.sim.blowup.controllers_blowup import BlowupController
from app.sim.blowup.models_blowup import BlowupFamily3D, Profile1D
from app.sim.blowup.services.characteristics_service import characteristics_service
from app.sim.diagnostics.controllers_diagnostics import DiagnosticsController
from app.sim.diagnostics.services.spectrum_service import spectrum_service
from app.sim.forcing.models_forcing import ForcingSpec
from app.sim.forcing.services.forcing_service import forcing_service
from app.sim.forcing.services.norms_service import norm_service
from app.sim.rotburgers2d.controllers_rotburgers2d import RotBurgers2DController
from app.sim.rotburgers2d.models_rotburgers2d import SimConfig2
from app.sim.rotburgers2d.services.rotation_service import RotationService
from app.sim.rotburgers3d.controllers_rotburgers3d import RotBurgers3DController
from app.sim.rotburgers3d.models_rotburgers3d import Rhs3Variant, SimConfig3
from app.sim.rotburgers3d.services.rk4_service import Rk4Service
from app.sim.rotkse2d.controllers_rotkse2d import RotKse2DController
from app.sim.rotkse2d.models_rotkse2d import KseConfig
from app.sim.rotkse2d.services.etd_service import EtdService, linear_symbol, phi1
from app.sim.run.services.profile_service import profile_service
from app.sim.spectral.models_spectral import make_grid
from app.sim.spectral.services.spectral_service import (
    get_spectral_service,
    lamb_from_gradient,
)
from app.sim.verify.models_verify import CheckResult, SuiteReport

log = logging.getLogger(__name__)

EPS = float(np.finfo(np.float64).eps)
BLOWUP_TIMES = (0.25, 0.5, 0.75)
MAX_PRINCIPLE_STEPS = 10_000


def _relative_drift(values: list[float]) -> float:
    return abs(values[-1] - values[0]) / abs(values[0])


def core_identities() -> list[CheckResult]:
    checks = []

    # u = (y, 0, x) has constant gradient and vorticity (0, −1, −1)
    s = np.linspace(-3.0, 3.0, 7)
    x, y, _ = np.meshgrid(s, s, s, indexing="ij")
    v = np.stack([y, np.zeros_like(x), x])
    J = np.zeros((3, 3) + x.shape)
    J[0, 1] = 1.0
    J[2, 0] = 1.0
    expected = np.stack([-x, -y, y])
    omega = np.stack([np.zeros_like(x), -np.ones_like(x), -np.ones_like(x)])
    checks.append(
        CheckResult.at_most(
            "lamb formula, linear field",
            float(np.max(np.abs(lamb_from_gradient(v, J) - expected))),
            0.0,
        )
    )
    checks.append(
        CheckResult.at_most(
            "cross product, linear field",
            float(np.max(np.abs(np.cross(omega, v, axis=0) - expected))),
            0.0,
        )
    )

    grid3 = make_grid(32, 3)
    ops3 = get_spectral_service(grid3)
    x, y, _ = grid3.mesh
    u = np.stack([np.sin(y), np.zeros_like(x), np.sin(x)])
    exact = np.stack(
        [-np.cos(x) * np.sin(x), -np.cos(y) * np.sin(y), np.cos(x) * np.sin(y)]
    )
    lamb = ops3.lamb3(u)
    checks.append(
        CheckResult.at_most(
            "lamb3 periodic case", float(np.max(np.abs(lamb - exact))), 1e-11
        )
    )
    checks.append(
        CheckResult.at_most(
            "lamb3 explicit vs cross",
            float(np.max(np.abs(ops3.lamb3_explicit(u) - lamb))),
            1e-11,
        )
    )
    abc = profile_service.abc(grid3)
    checks.append(
        CheckResult.at_most(
            "lamb3 Beltrami (ABC)", float(np.max(np.abs(ops3.lamb3(abc)))), 1e-11
        )
    )

    worst = 0.0
    for grid in (make_grid(128, 2), make_grid(32, 3)):
        ops = get_spectral_service(grid)
        for seed in range(20):
            field = profile_service.random_smooth(grid, seed=seed, k_max=8.0)
            lamb = ops.lamb(field)
            ratio = abs(ops.inner(lamb, field)) / (
                norm_service.norm_l2(field, grid) * norm_service.norm_l2(lamb, grid)
                + 1e-300
            )
            worst = max(worst, ratio)
    checks.append(CheckResult.at_most("L2 orthogonality of lamb", worst, 1e-12))

    field = profile_service.random_smooth(grid3, seed=11, k_max=5.0)
    force = forcing_service.generate(ForcingSpec(grashof=50.0, nu=0.1), grid3)
    checks.append(
        CheckResult.at_most(
            "divergence source identity",
            DiagnosticsController.divergence_source_check(field, nu=0.1, f=force),
            1e-9,
        )
    )

    tg = profile_service.taylor_green(grid3)
    rk4 = Rk4Service(ops3)
    gap = rk4.rhs3(tg, nu=0.1) - rk4.rhs3(tg, nu=0.1, variant=Rhs3Variant.CURL_CURL)
    checks.append(
        CheckResult.at_most(
            "curl-curl = Laplacian on solenoidal field",
            float(np.max(np.abs(gap))),
            1e-12,
        )
    )

    field2 = profile_service.random_smooth(make_grid(64, 2), seed=5, k_max=6.0)
    checks.append(
        CheckResult.recorded(
            "complex form residual (random field)",
            DiagnosticsController.complex_form_residual(field2),
        )
    )
    return checks


def scheme_2d() -> list[CheckResult]:
    checks = []

    grid = make_grid(128, 2)
    scheme = RotationService(get_spectral_service(grid))
    u = profile_service.random_smooth(grid, seed=7, k_max=6.0)
    energies = [norm_service.norm_l2(u, grid) ** 2]
    worst_ulps = 0.0
    for _ in range(1000):
        nxt = scheme.step_inviscid(u, 1e-3)
        speed = np.sqrt(np.sum(u * u, axis=0))
        speed_next = np.sqrt(np.sum(nxt * nxt, axis=0))
        moving = speed > 0
        ulps = np.abs(speed_next - speed)[moving] / (EPS * speed[moving])
        worst_ulps = max(worst_ulps, float(np.max(ulps)))
        u = nxt
        energies.append(norm_service.norm_l2(u, grid) ** 2)
    checks.append(
        CheckResult.at_most(
            "inviscid energy drift", _relative_drift(energies), 1e-11
        )
    )
    checks.append(
        CheckResult.at_most("pointwise |u| per step (ulps)", worst_ulps, 4.0)
    )

    small = make_grid(64, 2)
    u0 = profile_service.random_smooth(small, seed=2, k_max=4.0)
    trajectory = RotBurgers2DController.simulate(
        u0, SimConfig2(t_end=0.05, dt=1e-3, snapshot_every=1, diag_every=50)
    )
    checks.append(
        CheckResult.at_most(
            "rotation representation",
            RotBurgers2DController.rotation_representation_check(u0, 0.05, trajectory),
            1e-12,
        )
    )

    nu = 0.01
    dt = 0.2 * grid.dx**2 / nu
    viscous = RotBurgers2DController.simulate(
        profile_service.random_smooth(grid, seed=2, k_max=4.0),
        SimConfig2(
            t_end=MAX_PRINCIPLE_STEPS * dt,
            cfl=0.2,
            nu=nu,
            diag_every=1,
            snapshot_every=10**6,
        ),
    )
    sup0 = viscous.records[0].sup
    checks.append(
        CheckResult.at_most(
            "max principle excess per step",
            DiagnosticsController.max_principle_monitor(viscous),
            1e-8 * sup0,
        )
    )
    checks.append(
        CheckResult.holds(
            "sup|u| decays", viscous.records[-1].sup < sup0, viscous.records[-1].sup
        )
    )

    grid32 = make_grid(32, 2)
    force = forcing_service.generate(ForcingSpec(grashof=50.0, nu=0.1), grid32)
    u0 = profile_service.random_smooth(grid32, seed=4, k_max=3.0, amplitude=0.5)
    residuals = []
    for dt in (1e-2, 5e-3):
        run = RotBurgers2DController.simulate(
            u0,
            SimConfig2(t_end=1.0, dt=dt, nu=0.1, diag_every=1, snapshot_every=10**6),
            force,
        )
        residuals.append(
            DiagnosticsController.energy_balance_residual(run, 0.1, force)
        )
    checks.append(
        CheckResult.recorded("energy balance residual dt=1e-2", residuals[0])
    )
    checks.append(
        CheckResult.within(
            "energy balance halving ratio", residuals[1] / residuals[0], 0.4, 0.6
        )
    )

    scheme = RotationService(get_spectral_service(small))
    u = profile_service.random_smooth(small, seed=9, k_max=4.0)
    drifts = []
    for dt in (1e-3, 5e-4):
        nxt = scheme.step_viscous(u, dt, 0.1, 0.0, None)
        drifts.append(DiagnosticsController.mean_drift_residual(u, nxt, dt))
    checks.append(
        CheckResult.within(
            "mean drift halving ratio", drifts[1] / drifts[0], 0.4, 0.6
        )
    )
    return checks


def blowup() -> list[CheckResult]:
    checks = []
    cosine = Profile1D.cosine()
    checks.append(
        CheckResult.at_most(
            "shock time of cos x",
            abs(characteristics_service.shock_time(cosine) - 1.0),
            1e-10,
        )
    )

    grid = make_grid(512, 2)
    u0 = BlowupController.initial_family2d(grid)
    oracle = BlowupController.family2d_oracle()
    dt = 1e-4
    long_run = RotBurgers2DController.simulate(
        u0,
        SimConfig2(
            t_end=1.5, dt=dt, snapshot_every=round(0.25 / dt), diag_every=10
        ),
    )
    for t in BLOWUP_TIMES:
        checks.append(
            CheckResult.recorded(
                f"oracle gap t={t:g}, n=512, dt={dt:g}",
                BlowupController.compare_solver_vs_oracle(long_run, oracle, t),
            )
        )
    checks.append(
        CheckResult.holds(
            "guard trips before t=1.1",
            long_run.diverged and long_run.diverged_at < 1.1,
            long_run.diverged_at if long_run.diverged_at is not None else math.inf,
            detail=long_run.diverged_reason or "",
        )
    )

    fine = RotBurgers2DController.simulate(
        u0, SimConfig2(t_end=0.5, dt=dt / 2, snapshot_every=10**6, diag_every=100)
    )
    gap_coarse = BlowupController.compare_solver_vs_oracle(long_run, oracle, 0.5)
    gap_fine = BlowupController.compare_solver_vs_oracle(fine, oracle, 0.5)
    checks.append(
        CheckResult.at_most(f"oracle gap t=0.5, dt={dt:g}", gap_coarse, 1e-3)
    )
    checks.append(
        CheckResult.recorded(f"oracle gap t=0.5, dt={dt / 2:g}", gap_fine)
    )
    checks.append(
        CheckResult.within(
            "first-order halving ratio", gap_coarse / gap_fine, 1.6, 2.4
        )
    )

    grid3 = make_grid(32, 3)
    family = BlowupFamily3D.from_conserved(Profile1D.sine(0.5), 1.5)
    run3 = RotBurgers3DController.simulate3(
        BlowupController.initial_family3d(grid3, family),
        SimConfig3(t_end=0.25, dt=1e-3, snapshot_every=250, diag_every=50),
    )
    checks.append(
        CheckResult.at_most(
            "3D family oracle gap t=0.25",
            BlowupController.compare_solver_vs_oracle(
                run3, BlowupController.family3d_oracle(family), 0.25
            ),
            1e-8,
        )
    )
    return checks


def damped_absorbing() -> list[CheckResult]:
    nu, gamma = 0.1, 0.5
    grid = make_grid(128, 2)
    force = forcing_service.generate(ForcingSpec(grashof=5.0, nu=nu), grid)
    u0 = profile_service.cos_mode(grid, amplitude=0.1)
    bounds = DiagnosticsController.absorbing_ball_bounds(force, nu, gamma, u0=u0)
    run = RotBurgers2DController.simulate(
        u0,
        SimConfig2(
            t_end=10.0, cfl=0.2, nu=nu, gamma=gamma, diag_every=5, snapshot_every=10**6
        ),
        force,
    )
    l2_excess = max(
        (r.energy - bounds.rho0 for r in run.records if r.t >= bounds.t2),
        default=-math.inf,
    )
    sup_excess = max(
        (r.sup - bounds.rhoinf for r in run.records if r.t >= bounds.tinf),
        default=-math.inf,
    )
    return [
        CheckResult.holds(
            "initial energy outside the L2 ball",
            run.records[0].energy > bounds.rho0,
            run.records[0].energy,
        ),
        CheckResult.recorded("absorption time t2", bounds.t2),
        CheckResult.at_most("energy above rho0 after t2", l2_excess, 0.0),
        CheckResult.at_most("sup above rhoinf after tinf", sup_excess, 0.0),
        CheckResult.holds("run completes", not run.diverged),
    ]


def kse() -> list[CheckResult]:
    checks = []
    grid = make_grid(128, 2)
    ops = get_spectral_service(grid)

    # series branch just inside the threshold against the closed form
    z = np.nextafter(np.array([1e-4, -1e-4]), 0.0)
    jump = float(np.max(np.abs(phi1(z) - np.expm1(z) / z)))
    checks.append(CheckResult.at_most("phi1 series vs closed form", jump, 1e-12))

    lam = 4.0
    solver = EtdService(ops, lam)
    u = profile_service.cos_mode(grid)
    for _ in range(100):
        u = solver.etd1_step(u, 1e-2, nonlinear=False)
    exact = math.exp(float(linear_symbol(1.0, lam))) * profile_service.cos_mode(grid)
    checks.append(
        CheckResult.at_most(
            "exact linear subflow",
            float(np.max(np.abs(u - exact)) / np.max(exact)),
            1e-12,
        )
    )

    u0 = profile_service.random_smooth(grid, seed=3, k_max=3.0, amplitude=0.01)
    growing = RotKse2DController.simulate_kse(
        u0,
        KseConfig(
            t_end=10.0, dt=1e-3, diag_every=10, snapshot_every=10**6, lambda_=lam
        ),
    )
    checks.append(
        CheckResult.at_most(
            "Gronwall violations (lambda=4)",
            float(RotKse2DController.bound_violations(growing)),
            0.0,
        )
    )
    decaying = RotKse2DController.simulate_kse(
        u0,
        KseConfig(
            t_end=20.0, dt=1e-3, diag_every=100, snapshot_every=10**6, lambda_=0.5
        ),
    )
    checks.append(
        CheckResult.holds(
            "energy decays (lambda=0.5)",
            decaying.records[-1].energy < decaying.records[0].energy,
            decaying.records[-1].energy,
        )
    )
    return checks


def helicity_3d() -> list[CheckResult]:
    checks = []
    grid = make_grid(32, 3)
    ops = get_spectral_service(grid)
    u0 = profile_service.abc(grid, 0.5) + profile_service.random_smooth(
        grid, seed=3, k_max=3.0
    )

    drifts = {}
    for dt in (1e-3, 5e-4):
        run = RotBurgers3DController.simulate3(
            u0, SimConfig3(t_end=0.1, dt=dt, diag_every=10**6, snapshot_every=10**6)
        )
        drifts[dt] = (
            _relative_drift([r.helicity for r in run.records]),
            _relative_drift([r.energy for r in run.records]),
        )
    for index, label in enumerate(("helicity", "energy")):
        coarse, fine = drifts[1e-3][index], drifts[5e-4][index]
        checks.append(CheckResult.at_most(f"{label} drift dt=1e-3", coarse, 1e-8))
        checks.append(
            CheckResult.within(f"{label} drift ratio", coarse / fine, 11.2, 20.8)
        )

    nu = 0.1
    shear = np.zeros((3,) + grid.shape)
    shear[0] = np.sin(grid.mesh[0])
    heat = RotBurgers3DController.simulate3(
        shear, SimConfig3(t_end=0.1, dt=1e-3, nu=nu, snapshot_every=100)
    )
    checks.append(
        CheckResult.at_most(
            "gradient data follows the heat equation",
            float(np.max(np.abs(heat.final_state - math.exp(-nu * 0.1) * shear))),
            1e-10,
        )
    )

    field = profile_service.random_smooth(grid, seed=8, k_max=4.0)
    run = RotBurgers3DController.simulate3(
        field, SimConfig3(t_end=0.04, dt=1e-3, snapshot_every=10, diag_every=10)
    )
    report = DiagnosticsController.divergence_dynamics_residual(run)
    checks.append(CheckResult.recorded("divergence residual", report.residual_fine))
    checks.append(
        CheckResult.within("divergence residual order", report.order, 1.6, 2.4)
    )
    return checks


def headline() -> list[CheckResult]:
    """Forced 2D run at desk scale: n=256, ν=0.005, G=20, γ=0 up to T=200"""
    nu, t_end = 0.005, 200.0
    grid = make_grid(256, 2)
    force = forcing_service.generate(ForcingSpec(seed=0, grashof=20.0, nu=nu), grid)
    run = RotBurgers2DController.simulate(
        np.zeros((2,) + grid.shape),
        SimConfig2(
            t_end=t_end,
            cfl=0.2,
            nu=nu,
            diag_every=100,
            snapshot_every=10**6,
            spectrum_every=2000,
        ),
        force,
    )
    f_sup = norm_service.norm_linf(force.values, grid)
    unresolved = sum(
        not spectrum_service.is_resolved(spectrum, grid) for spectrum in run.spectra
    )
    finite = all(
        math.isfinite(r.l2) and math.isfinite(r.grad_l2) and math.isfinite(r.sup)
        for r in run.records
    )
    # forced max principle from u₀ = 0: sup|u(t)| ≤ t‖f‖∞
    sup_excess = max(r.sup - r.t * f_sup for r in run.records)
    return [
        CheckResult.holds(
            "run completes",
            not run.diverged,
            run.final_time,
            detail=run.diverged_reason or "",
        ),
        CheckResult.at_most("unresolved spectra", float(unresolved), 0.0),
        CheckResult.holds("norms finite", finite),
        CheckResult.at_most("sup|u| above t*|f|inf", sup_excess, 1e-12),
        CheckResult.recorded("final energy", run.records[-1].energy),
        CheckResult.recorded("final sup|grad u|", run.records[-1].grad_sup),
    ]


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "core-identities": core_identities,
    "scheme-2d": scheme_2d,
    "blowup": blowup,
    "damped-absorbing": damped_absorbing,
    "kse": kse,
    "helicity-3d": helicity_3d,
    "headline": headline,
}


class VerifyController:
    """Named verification suites with a pass/fail table"""

    @staticmethod
    def run_suite(name: str) -> SuiteReport:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
        log.info(f"Running verification suite {name}")
        started = time.perf_counter()
        try:
            checks = SUITES[name]()
        except Exception as e:
            log.error(f"Suite {name} failed to run: {e}")
            raise
        report = SuiteReport(
            suite=name, checks=checks, seconds=time.perf_counter() - started
        )
        log.info(
            f"Suite {name}: {sum(c.passed for c in checks)}/{len(checks)} passed "
            f"in {report.seconds:.1f}s"
        )
        return report

    @staticmethod
    def format_table(report: SuiteReport) -> list[str]:
        lines = [f"{'check':<44} {'value':>12} {'limit':>21}  result"]
        for check in report.checks:
            if check.limit is None:
                limit = "recorded"
            elif check.lower is not None:
                limit = f"[{check.lower:.3g}, {check.limit:.3g}]"
            else:
                limit = f"<= {check.limit:.3e}"
            status = "PASS" if check.passed else "FAIL"
            lines.append(
                f"{check.name:<44} {check.value:>12.4e} {limit:>21}  {status}"
            )
        verdict = "PASS" if report.passed else "FAIL"
        lines.append(f"{report.suite}: {verdict} ({report.seconds:.1f}s)")
        return lines
