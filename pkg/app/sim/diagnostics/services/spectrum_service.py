import logging

import numpy as np

from app.sim.diagnostics.models_diagnostics import SpectrumRecord
from app.sim.spectral.models_spectral import Grid
from app.sim.spectral.services.spectral_service import get_spectral_service

log = logging.getLogger(__name__)

RESOLVED_RATIO = 1e-12


class SpectrumService:
    """Shell-binned energy spectra E_k = (Σ_{k≤|ℓ|<k+1} |û_ℓ|²)^{1/2}"""

    def shell_power(self, u: np.ndarray, grid: Grid) -> np.ndarray:
        """Σ |û_ℓ|² per shell k = 0 … n/2 − 1; corners beyond n/2 are dropped"""
        ops = get_spectral_service(grid, dealias=False)
        U = ops.fft_forward(u)
        power = np.abs(U) ** 2
        if power.ndim > grid.dim:
            power = power.sum(axis=0)
        power = power * grid.half_weights
        shells = np.floor(grid.kmag).astype(np.int64).ravel()
        n_shells = grid.n // 2
        inside = shells < n_shells
        return np.bincount(
            shells[inside], weights=power.ravel()[inside], minlength=n_shells
        )

    def energy_spectrum(
        self,
        u: np.ndarray,
        grid: Grid,
        step: int | None = None,
        t: float | None = None,
    ) -> SpectrumRecord:
        return SpectrumRecord(
            energy=np.sqrt(self.shell_power(u, grid)), step=step, t=t
        )

    def is_resolved(self, spectrum: SpectrumRecord, grid: Grid) -> bool:
        """Top tenth of the shells below the cutoff sit at ≤ 1e−12 of the peak"""
        peak = float(np.max(spectrum.energy, initial=0.0))
        if peak == 0.0:
            return True
        cutoff = grid.dealias_cutoff
        tail = spectrum.energy[int(0.9 * cutoff) : cutoff]
        ratio = float(np.max(tail, initial=0.0)) / peak
        log.debug(f"Spectrum tail ratio {ratio:.3e} on n={grid.n}")
        return ratio <= RESOLVED_RATIO


spectrum_service = SpectrumService()
