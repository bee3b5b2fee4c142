from functools import cached_property
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class Grid(BaseModel):
    """Uniform grid on the 2π-periodic box [−π, π)^dim"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=8, description="Points per axis (even)")
    dim: Literal[2, 3] = Field(..., description="Spatial dimension")

    @field_validator("n")
    @classmethod
    def _n_even(cls, n: int) -> int:
        if n % 2:
            raise ValueError(f"grid resolution must be even, got {n}")
        return n

    # cached arrays live in __dict__, so compare by resolution only
    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return (self.n, self.dim) == (other.n, other.dim)

    def __hash__(self) -> int:
        return hash((self.n, self.dim))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def spectral_shape(self) -> tuple[int, ...]:
        """Shape of the real-to-complex half spectrum (last axis halved)"""
        return (self.n,) * (self.dim - 1) + (self.n // 2 + 1,)

    @property
    def axes(self) -> tuple[int, ...]:
        return tuple(range(-self.dim, 0))

    @property
    def dx(self) -> float:
        return 2.0 * np.pi / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def box_volume(self) -> float:
        return (2.0 * np.pi) ** self.dim

    @property
    def dealias_cutoff(self) -> int:
        return self.n // 3

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Sample points x_j = −π + j·dx along one axis"""
        return _readonly(-np.pi + self.dx * np.arange(self.n))

    @cached_property
    def mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays with ij indexing (axis 0 is x)"""
        grids = np.meshgrid(*([self.coordinates] * self.dim), indexing="ij")
        return tuple(_readonly(g) for g in grids)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Integer wavenumbers per axis, broadcastable over the half spectrum"""
        full = np.fft.fftfreq(self.n, 1.0 / self.n)
        half = np.fft.rfftfreq(self.n, 1.0 / self.n)
        ks = []
        for axis in range(self.dim):
            k = half if axis == self.dim - 1 else full
            shape = [1] * self.dim
            shape[axis] = k.size
            ks.append(_readonly(k.reshape(shape).copy()))
        return tuple(ks)

    @cached_property
    def derivative_wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Wavenumbers with the Nyquist entry zeroed"""
        out = []
        for k in self.wavenumbers:
            kd = np.where(np.abs(k) == self.n // 2, 0.0, k)
            out.append(_readonly(kd))
        return tuple(out)

    @cached_property
    def k2(self) -> np.ndarray:
        return _readonly(sum(k**2 for k in self.wavenumbers))

    @cached_property
    def kmag(self) -> np.ndarray:
        return _readonly(np.sqrt(self.k2))

    @cached_property
    def half_weights(self) -> np.ndarray:
        """Multiplicity of each half-spectrum entry in the full lattice"""
        w = np.full(self.n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        shape = [1] * (self.dim - 1) + [w.size]
        return _readonly(np.broadcast_to(w.reshape(shape), self.spectral_shape).copy())

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        cutoff = self.dealias_cutoff
        mask = np.ones(self.spectral_shape, dtype=bool)
        for k in self.wavenumbers:
            mask &= np.abs(k) <= cutoff
        return _readonly(mask)

    @cached_property
    def phase(self) -> np.ndarray:
        """(−1)^(k_1+…+k_d): shifts FFT coefficients to the box origin at −π"""
        p = np.ones(self.spectral_shape)
        for k in self.wavenumbers:
            p = p * np.where(k.astype(np.int64) % 2 == 0, 1.0, -1.0)
        return _readonly(p)


class Grid2(Grid):
    dim: Literal[2] = 2


class Grid3(Grid):
    dim: Literal[3] = 3


def make_grid(n: int, dim: int) -> Grid:
    """Build a Grid2 or Grid3 for the given dimension"""
    if dim == 2:
        return Grid2(n=n)
    if dim == 3:
        return Grid3(n=n)
    raise ValueError(f"unsupported dimension {dim}")
