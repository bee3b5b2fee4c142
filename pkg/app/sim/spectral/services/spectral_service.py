import logging
from functools import lru_cache

import numpy as np
import scipy.fft as spfft

from app.sim.base.errors import StructuralError
from app.sim.spectral.models_spectral import Grid
from utilities import envs

log = logging.getLogger(__name__)


def lamb_from_gradient(v: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Σ_j v_j (J_ij − J_ji) with J[i, j] = ∂_j v_i, evaluated pointwise"""
    advection = np.einsum("j...,ij...->i...", v, J)
    grad_half_speed2 = np.einsum("j...,ji...->i...", v, J)
    return advection - grad_half_speed2


class SpectralService:
    """Transforms and spectral differential operators bound to one grid.

    Real fields have shape grid.shape, vector fields (dim,) + grid.shape with
    component 0 along x. Spectra are half spectra of true Fourier-series
    coefficients: the forward transform divides by n per axis and the sample
    at index 0 sits at x = −π, so cos x has coefficient 1/2 at k = ±1.

    With dealias=True every physical-space product is formed from 2/3-rule
    truncated factors and truncated again afterwards.
    """

    def __init__(self, grid: Grid, dealias: bool = True, workers: int | None = None):
        self.grid = grid
        self.dealias = dealias
        self.workers = workers if workers is not None else envs.get_fft_workers()

    # Transforms

    def fft_forward(self, f: np.ndarray) -> np.ndarray:
        self._check_physical(f)
        F = spfft.rfftn(f, axes=self.grid.axes, norm="forward", workers=self.workers)
        F *= self.grid.phase
        return F

    def fft_inverse(self, F: np.ndarray) -> np.ndarray:
        self._check_spectral(F)
        return spfft.irfftn(
            F * self.grid.phase,
            s=self.grid.shape,
            axes=self.grid.axes,
            norm="forward",
            workers=self.workers,
        )

    # Masks and projections

    def dealias_two_thirds(self, F: np.ndarray) -> np.ndarray:
        self._check_spectral(F)
        return F * self.grid.dealias_mask

    def project_pn(self, F: np.ndarray, N: float) -> np.ndarray:
        """Radial Galerkin projection onto |k| ≤ N"""
        if N < 0:
            raise ValueError(f"projection radius must be non-negative, got {N}")
        self._check_spectral(F)
        return F * (self.grid.kmag <= N)

    def truncate(self, F: np.ndarray) -> np.ndarray:
        """2/3-rule truncation when the service dealiases, identity otherwise"""
        return F * self.grid.dealias_mask if self.dealias else F

    # Derivatives

    def deriv(self, F: np.ndarray, axis: int) -> np.ndarray:
        self._check_spectral(F)
        return 1j * self.grid.derivative_wavenumbers[axis] * F

    def gradient_hat(self, F: np.ndarray) -> np.ndarray:
        """Spectral gradient of a scalar spectrum, components stacked first"""
        return np.stack([self.deriv(F, a) for a in range(self.grid.dim)])

    def jacobian(self, v: np.ndarray) -> np.ndarray:
        """J[i, j] = ∂_j v_i in physical space"""
        V = self.fft_forward(self._check_vector(v))
        return np.stack(
            [self.fft_inverse(self.gradient_hat(V[i])) for i in range(self.grid.dim)]
        )

    def curl2_hat(self, V: np.ndarray) -> np.ndarray:
        return self.deriv(V[1], 0) - self.deriv(V[0], 1)

    def curl3_hat(self, V: np.ndarray) -> np.ndarray:
        d = self.deriv
        return np.stack(
            [
                d(V[2], 1) - d(V[1], 2),
                d(V[0], 2) - d(V[2], 0),
                d(V[1], 0) - d(V[0], 1),
            ]
        )

    def curl2(self, v: np.ndarray, dealias: bool = False) -> np.ndarray:
        """Scalar vorticity ω = ∂x v2 − ∂y v1"""
        V = self.fft_forward(self._check_vector(v, dim=2))
        W = self.curl2_hat(V)
        if dealias:
            W = self.dealias_two_thirds(W)
        return self.fft_inverse(W)

    def curl3(self, v: np.ndarray) -> np.ndarray:
        V = self.fft_forward(self._check_vector(v, dim=3))
        return self.fft_inverse(self.curl3_hat(V))

    def curl(self, v: np.ndarray) -> np.ndarray:
        """Vorticity of a 2D (scalar result) or 3D (vector result) field"""
        return self.curl2(v) if self.grid.dim == 2 else self.curl3(v)

    def div_hat(self, V: np.ndarray) -> np.ndarray:
        return sum(self.deriv(V[a], a) for a in range(self.grid.dim))

    def div(self, v: np.ndarray) -> np.ndarray:
        V = self.fft_forward(self._check_vector(v))
        return self.fft_inverse(self.div_hat(V))

    def laplacian_hat(self, F: np.ndarray) -> np.ndarray:
        """−|k|²F over the whole lattice, Nyquist modes included"""
        return -self.grid.k2 * F

    def curl_curl_hat(self, V: np.ndarray) -> np.ndarray:
        """∇×∇×V as ∇(∇·V) − ΔV, which acts as −Δ on Nyquist modes"""
        return self.gradient_hat(self.div_hat(V)) - self.laplacian_hat(V)

    def laplacian(self, v: np.ndarray) -> np.ndarray:
        """Spectral Laplacian of a scalar or vector field"""
        return self.fft_inverse(self.laplacian_hat(self.fft_forward(v)))

    def band_limit(self, v: np.ndarray) -> np.ndarray:
        """Physical field projected onto the 2/3 band when the service dealiases"""
        if not self.dealias:
            return v
        return self.fft_inverse(self.truncate(self.fft_forward(v)))

    # Lamb vector

    def lamb2(self, v: np.ndarray) -> np.ndarray:
        """ω u⊥ = (−ω v2, ω v1)"""
        V = self.truncate(self.fft_forward(self._check_vector(v, dim=2)))
        vd = self.fft_inverse(V) if self.dealias else v
        omega = self.fft_inverse(self.curl2_hat(V))
        product = np.stack([-omega * vd[1], omega * vd[0]])
        return self._dealias_product(product)

    def lamb3(self, v: np.ndarray) -> np.ndarray:
        """(∇×v)×v with a spectral curl and a pointwise cross product"""
        V = self.truncate(self.fft_forward(self._check_vector(v, dim=3)))
        vd = self.fft_inverse(V) if self.dealias else v
        omega = self.fft_inverse(self.curl3_hat(V))
        product = np.cross(omega, vd, axis=0)
        return self._dealias_product(product)

    def lamb(self, v: np.ndarray) -> np.ndarray:
        return self.lamb2(v) if self.grid.dim == 2 else self.lamb3(v)

    def lamb3_explicit(self, v: np.ndarray) -> np.ndarray:
        """Lamb vector from the velocity gradient, component by component.

        (ω×v)_i = Σ_j v_j (∂_j v_i − ∂_i v_j), i.e. (v·∇)v − ∇(|v|²/2).
        """
        v = self._check_vector(v, dim=3)
        if self.dealias:
            v = self.fft_inverse(self.dealias_two_thirds(self.fft_forward(v)))
        return self._dealias_product(lamb_from_gradient(v, self.jacobian(v)))

    # Quadrature

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        """L² inner product by the rectangle rule (exact for band-limited data)"""
        return float(self.grid.cell_volume * np.sum(a * b))

    def spectral_energy(self, F: np.ndarray) -> float:
        """(2π)^d Σ_k |F_k|² over the full lattice, summed over components"""
        return float(
            self.grid.box_volume * np.sum(self.grid.half_weights * np.abs(F) ** 2)
        )

    # Validation

    def _dealias_product(self, product: np.ndarray) -> np.ndarray:
        if not self.dealias:
            return product
        return self.fft_inverse(self.dealias_two_thirds(self.fft_forward(product)))

    def _check_physical(self, f: np.ndarray) -> None:
        if f.shape[-self.grid.dim :] != self.grid.shape or f.ndim > self.grid.dim + 1:
            raise StructuralError(
                f"field of shape {f.shape} does not match grid {self.grid.shape}"
            )

    def _check_spectral(self, F: np.ndarray) -> None:
        if (
            F.shape[-self.grid.dim :] != self.grid.spectral_shape
            or F.ndim > self.grid.dim + 1
        ):
            raise StructuralError(
                f"spectrum of shape {F.shape} does not match grid "
                f"{self.grid.spectral_shape}"
            )

    def _check_vector(self, v: np.ndarray, dim: int | None = None) -> np.ndarray:
        components = self.grid.dim if dim is None else dim
        if components != self.grid.dim or v.shape != (components,) + self.grid.shape:
            raise StructuralError(
                f"expected a {components}-component field on grid {self.grid.shape}, "
                f"got shape {v.shape}"
            )
        return v


@lru_cache(maxsize=32)
def get_spectral_service(grid: Grid, dealias: bool = True) -> SpectralService:
    """Shared operator instance per (grid, dealias)"""
    log.debug(f"Creating spectral service for n={grid.n}, dim={grid.dim}")
    return SpectralService(grid, dealias=dealias)
