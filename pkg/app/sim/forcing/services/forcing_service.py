import itertools
import logging
import math

import numpy as np

from app.sim.base.errors import DomainError
from app.sim.forcing.models_forcing import ForceField, ForcingSpec
from app.sim.forcing.services.rng_service import SplitMix64
from app.sim.spectral.models_spectral import Grid
from app.sim.spectral.services.spectral_service import get_spectral_service

log = logging.getLogger(__name__)


class ForcingService:
    """Deterministic annulus forcing scaled to a Grashof number"""

    def lattice_modes(
        self, grid: Grid, k_min: float, k_max: float
    ) -> list[tuple[int, ...]]:
        """Lattice points with k_min ≤ |k| ≤ k_max on the canonical half lattice.

        Canonical means the first nonzero coordinate is positive; modes with a
        Nyquist coordinate (|k_i| = n/2) are never included. Order is
        lexicographic, which is also the draw order.
        """
        reach = min(int(math.floor(k_max)), grid.n // 2 - 1)
        span = range(-reach, reach + 1)
        modes = []
        for k in itertools.product(span, repeat=grid.dim):
            first = next((c for c in k if c != 0), 0)
            if first <= 0:
                continue
            radius = math.sqrt(sum(c * c for c in k))
            if k_min <= radius <= k_max:
                modes.append(k)
        return modes

    def canonical_modes(self, spec: ForcingSpec, grid: Grid) -> list[tuple[int, ...]]:
        return self.lattice_modes(grid, spec.k_min, spec.k_max)

    def random_spectrum(
        self, grid: Grid, seed: int, modes: list[tuple[int, ...]]
    ) -> np.ndarray:
        """Half spectrum with standard complex normal coefficients on modes.

        Each canonical mode draws (re, im) per component from one SplitMix64
        stream; its mirror −k gets the conjugate, so the field is real.
        """
        rng = SplitMix64(seed)
        full = np.zeros((grid.dim,) + grid.shape, dtype=np.complex128)
        for k in modes:
            index = tuple(c % grid.n for c in k)
            mirror = tuple(-c % grid.n for c in k)
            for component in range(grid.dim):
                re = rng.normal()
                im = rng.normal()
                full[(component,) + index] = complex(re, im)
                full[(component,) + mirror] = complex(re, -im)
        return full[..., : grid.n // 2 + 1]

    def generate(self, spec: ForcingSpec, grid: Grid) -> ForceField:
        modes = self.canonical_modes(spec, grid)
        if not modes:
            raise DomainError(
                f"no forced modes: annulus [{spec.k_min}, {spec.k_max}] misses "
                f"the lattice of n={grid.n}"
            )

        ops = get_spectral_service(grid, dealias=False)
        half = self.random_spectrum(grid, spec.seed, modes)
        raw = ops.fft_inverse(half)
        norm0 = math.sqrt(ops.spectral_energy(half))
        scale = spec.target_norm / norm0
        values = raw * scale

        log.info(
            f"Generated forcing on {len(modes)} canonical modes "
            f"(seed={spec.seed}, G={spec.grashof}, nu={spec.nu}, n={grid.n})"
        )
        return ForceField(grid=grid, values=values, spec=spec)


forcing_service = ForcingService()
