import logging

import numpy as np
from pydantic import ValidationError

from app.sim.base.errors import ConfigError, DomainError
from app.sim.blowup.controllers_blowup import BlowupController
from app.sim.blowup.models_blowup import BlowupFamily3D, Profile1D
from app.sim.forcing.services.forcing_service import forcing_service
from app.sim.forcing.services.norms_service import norm_service
from app.sim.spectral.models_spectral import Grid
from app.sim.spectral.services.spectral_service import get_spectral_service

log = logging.getLogger(__name__)


class ProfileService:
    """Named analytic and seeded initial velocity fields"""

    def build(
        self,
        name: str,
        grid: Grid,
        amplitude: float = 1.0,
        seed: int = 0,
        k_max: float = 4.0,
        conserved: float | None = None,
    ) -> np.ndarray:
        builders = {
            "blowup2d": lambda: self.blowup2d(grid),
            "blowup3d": lambda: self.blowup3d(grid, amplitude, conserved),
            "taylor_green": lambda: self.taylor_green(grid, amplitude),
            "abc": lambda: self.abc(grid, amplitude),
            "random_smooth": lambda: self.random_smooth(grid, seed, k_max, amplitude),
            "cos_mode": lambda: self.cos_mode(grid, amplitude),
        }
        if name not in builders:
            raise ConfigError(f"unknown profile {name!r}", field="initial.profile")
        log.info(f"Building initial profile {name} on n={grid.n}, dim={grid.dim}")
        return builders[name]()

    def blowup2d(self, grid: Grid) -> np.ndarray:
        if grid.dim != 2:
            raise ConfigError("blowup2d is a 2D profile", field="initial.profile")
        return BlowupController.initial_family2d(grid)

    def blowup3d(
        self, grid: Grid, amplitude: float = 1.0, conserved: float | None = None
    ) -> np.ndarray:
        """v₀ = a·sin x, w₀ = √(c − 2v₀²); c defaults to 2a² + 1"""
        if grid.dim != 3:
            raise ConfigError("blowup3d is a 3D profile", field="initial.profile")
        c = 2.0 * amplitude**2 + 1.0 if conserved is None else conserved
        try:
            family = BlowupFamily3D.from_conserved(Profile1D.sine(amplitude), c)
        except ValidationError as e:
            raise ConfigError(
                f"c={c:g} must exceed 2*amplitude^2={2.0 * amplitude**2:g}",
                field="initial.conserved",
            ) from e
        return BlowupController.initial_family3d(grid, family)

    def taylor_green(self, grid: Grid, amplitude: float = 1.0) -> np.ndarray:
        if grid.dim == 2:
            x, y = grid.mesh
            field = [np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)]
        else:
            x, y, z = grid.mesh
            field = [
                np.sin(x) * np.cos(y) * np.cos(z),
                -np.cos(x) * np.sin(y) * np.cos(z),
                np.zeros(grid.shape),
            ]
        return amplitude * np.stack(field)

    def abc(self, grid: Grid, amplitude: float = 1.0) -> np.ndarray:
        """Arnold–Beltrami–Childress flow with A = B = C; ∇×u = u"""
        if grid.dim != 3:
            raise ConfigError("abc is a 3D profile", field="initial.profile")
        x, y, z = grid.mesh
        a = amplitude
        return np.stack(
            [
                a * np.sin(z) + a * np.cos(y),
                a * np.sin(x) + a * np.cos(z),
                a * np.sin(y) + a * np.cos(x),
            ]
        )

    def cos_mode(self, grid: Grid, amplitude: float = 1.0) -> np.ndarray:
        field = np.zeros((grid.dim,) + grid.shape)
        field[0] = amplitude * np.cos(grid.mesh[0])
        return field

    def random_smooth(
        self, grid: Grid, seed: int = 0, k_max: float = 4.0, amplitude: float = 1.0
    ) -> np.ndarray:
        """Mean-free field on 1 ≤ |k| ≤ k_max scaled to sup|u| = amplitude"""
        modes = forcing_service.lattice_modes(grid, 0.5, k_max)
        if not modes:
            raise DomainError(f"no lattice modes with |k| <= {k_max} on n={grid.n}")
        ops = get_spectral_service(grid, dealias=False)
        field = ops.fft_inverse(forcing_service.random_spectrum(grid, seed, modes))
        return amplitude * field / norm_service.norm_linf(field, grid)


profile_service = ProfileService()
