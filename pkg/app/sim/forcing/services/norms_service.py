import logging

import numpy as np

from app.sim.base.errors import DomainError, StructuralError
from app.sim.spectral.models_spectral import Grid, make_grid
from app.sim.spectral.services.spectral_service import get_spectral_service

log = logging.getLogger(__name__)

MEAN_FREE_RTOL = 1e-12


def infer_grid(f: np.ndarray) -> Grid:
    """Grid of a scalar or vector field from its shape alone.

    A leading axis shorter than the minimum resolution holds components.
    """
    n = f.shape[-1]
    spatial = f.shape[1:] if f.shape[0] < 8 else f.shape
    if len(spatial) not in (2, 3) or any(s != n for s in spatial):
        raise StructuralError(f"cannot infer a square grid from shape {f.shape}")
    return make_grid(n, len(spatial))


class NormService:
    """L², L∞ and H⁻¹ norms of periodic fields"""

    def norm_l2(self, f: np.ndarray, grid: Grid | None = None) -> float:
        grid = grid or infer_grid(f)
        return float(np.sqrt(grid.cell_volume * np.sum(f * f)))

    def norm_linf(self, f: np.ndarray, grid: Grid | None = None) -> float:
        """Max over the grid of the pointwise (vector) magnitude"""
        grid = grid or infer_grid(f)
        if f.ndim == grid.dim:
            return float(np.max(np.abs(f)))
        return float(np.sqrt(np.max(np.sum(f * f, axis=0))))

    def norm_hminus1(self, f: np.ndarray, grid: Grid | None = None) -> float:
        """((2π)^d Σ_k (1+|k|²)^{-1} |f̂_k|²)^{1/2}; f must be mean-free"""
        grid = grid or infer_grid(f)
        ops = get_spectral_service(grid, dealias=False)
        F = ops.fft_forward(f)
        total = np.sqrt(np.sum(grid.half_weights * np.abs(F) ** 2))
        mean_part = F[(Ellipsis,) + (0,) * grid.dim]
        if np.max(np.abs(mean_part), initial=0.0) > MEAN_FREE_RTOL * total:
            raise DomainError("H^-1 norm requires a mean-free field")
        weighted = grid.half_weights * np.abs(F) ** 2 / (1.0 + grid.k2)
        return float(np.sqrt(grid.box_volume * np.sum(weighted)))

    def norms(self, f: np.ndarray, grid: Grid | None = None) -> dict[str, float]:
        grid = grid or infer_grid(f)
        return {
            "l2": self.norm_l2(f, grid),
            "linf": self.norm_linf(f, grid),
            "hminus1": self.norm_hminus1(f, grid),
        }


norm_service = NormService()
