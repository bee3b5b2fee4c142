import logging
from collections.abc import Callable

import numpy as np
import scipy.fft as spfft

from app.sim.base.errors import StructuralError
from app.sim.base.models import Trajectory
from app.sim.blowup.models_blowup import BlowupFamily3D, Profile1D
from app.sim.blowup.services.characteristics_service import characteristics_service
from app.sim.spectral.models_spectral import Grid

log = logging.getLogger(__name__)

Oracle = Callable[[np.ndarray, float], tuple[np.ndarray, ...]]


def _broadcast_rows(grid: Grid, columns: tuple[np.ndarray, ...]) -> np.ndarray:
    """Extend x-only component profiles across the remaining axes"""
    shape = (grid.n,) + (1,) * (grid.dim - 1)
    return np.stack(
        [np.broadcast_to(c.reshape(shape), grid.shape).copy() for c in columns]
    )


class BlowupController:
    """Exact blow-up families as initial data and as reference solutions"""

    @staticmethod
    def family2d_oracle() -> Oracle:
        return characteristics_service.family2d

    @staticmethod
    def family3d_oracle(fam: BlowupFamily3D) -> Oracle:
        def oracle(x: np.ndarray, t: float) -> tuple[np.ndarray, ...]:
            return characteristics_service.family3d(x, t, fam)

        return oracle

    @staticmethod
    def oracle_field(grid: Grid, oracle: Oracle, t: float) -> np.ndarray:
        return _broadcast_rows(grid, oracle(grid.coordinates, t))

    @staticmethod
    def initial_family2d(grid: Grid) -> np.ndarray:
        """(cos x, sin x) on every row of a 2D grid"""
        return BlowupController.oracle_field(
            grid, characteristics_service.family2d, 0.0
        )

    @staticmethod
    def initial_family3d(grid: Grid, fam: BlowupFamily3D) -> np.ndarray:
        return BlowupController.oracle_field(
            grid, BlowupController.family3d_oracle(fam), 0.0
        )

    @staticmethod
    def compare_solver_vs_oracle(
        trajectory: Trajectory, oracle: Oracle, t: float
    ) -> float:
        """L∞ gap between the stored snapshot at t and the exact family"""
        try:
            state = trajectory.state_at(t)
            exact = BlowupController.oracle_field(trajectory.grid, oracle, t)
            if exact.shape != state.shape:
                raise StructuralError(
                    f"oracle has {exact.shape[0]} components, trajectory "
                    f"{state.shape[0]}"
                )
            diff = state - exact
            error = float(np.sqrt(np.max(np.sum(diff * diff, axis=0))))
            log.info(f"Oracle gap at t={t:g} on n={trajectory.grid.n}: {error:.3e}")
            return error

        except Exception as e:
            log.error(f"Oracle comparison failed at t={t}: {e}")
            raise

    @staticmethod
    def row_deviation(state: np.ndarray) -> float:
        """Largest departure of any row from the first (y/z independence)"""
        flat = state.reshape(state.shape[0], state.shape[1], -1)
        return float(np.max(np.abs(flat - flat[:, :, :1])))

    @staticmethod
    def gradient_sup(u0: Profile1D, t: float, n: int = 2048) -> float:
        """max_x |∂x u(·, t)| by spectral differentiation of n oracle samples"""
        x = -np.pi + 2.0 * np.pi * np.arange(n) / n
        u = characteristics_service.burgers_characteristics(u0, x, t)
        k = spfft.rfftfreq(n, 1.0 / n)
        k[-1] = 0.0
        ux = spfft.irfft(1j * k * spfft.rfft(u), n=n)
        return float(np.max(np.abs(ux)))
