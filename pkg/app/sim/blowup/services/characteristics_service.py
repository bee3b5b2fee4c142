import logging
import math

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from app.sim.base.errors import DomainError, PostShockQueryError
from app.sim.blowup.models_blowup import BlowupFamily3D, Profile1D

log = logging.getLogger(__name__)

SHOCK_SAMPLES = 10_000
BISECT_XTOL = 1e-13
NEWTON_POLISH = 3
FOOT_RESIDUAL_TOL = 1e-11


class CharacteristicsService:
    """Exact pre-shock solutions of u_t + u u_x = 0 and the blow-up families"""

    def __init__(self):
        self._unit_cosine = Profile1D.cosine()

    def shock_time(self, u0: Profile1D) -> float:
        """t* = −1 / min u0′, or +∞ when u0′ never goes negative"""
        x = np.linspace(-math.pi, math.pi, SHOCK_SAMPLES, endpoint=False)
        slopes = u0.derivative(x)
        i = int(np.argmin(slopes))
        slope_min = float(slopes[i])
        h = x[1] - x[0]
        try:
            refined = minimize_scalar(
                lambda s: float(u0.derivative(np.asarray(s))),
                bracket=(x[i] - h, x[i], x[i] + h),
                method="golden",
            )
            slope_min = min(slope_min, float(refined.fun))
        except ValueError:
            log.debug(f"Golden refinement skipped for {u0.name}: flat minimum")
        if slope_min >= 0.0:
            return math.inf
        return -1.0 / slope_min

    def foot(
        self, u0: Profile1D, x, t: float, shock: float | None = None
    ) -> np.ndarray:
        """Characteristic foot ξ with x = ξ + t·u0(ξ)"""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if t == 0.0:
            return x.copy()
        shock = self.shock_time(u0) if shock is None else shock
        if t < 0 or t >= shock:
            raise PostShockQueryError(
                f"query at t={t} is not before the shock time {shock:.12g} of {u0.name}"
            )

        samples = u0(np.linspace(-math.pi, math.pi, SHOCK_SAMPLES, endpoint=False))
        pad = 1e-3 * (1.0 + t)
        top, bottom = float(np.max(samples)), float(np.min(samples))

        xi = np.empty_like(x)
        residual = np.empty_like(x)
        for j, xj in enumerate(x):

            def gap(s: float) -> float:
                return s + t * float(u0(s)) - xj

            lo = xj - t * top - pad
            hi = xj - t * bottom + pad
            s = bisect(gap, lo, hi, xtol=BISECT_XTOL)
            for _ in range(NEWTON_POLISH):
                slope = 1.0 + t * float(u0.derivative(np.asarray(s)))
                s -= gap(s) / slope
            xi[j] = s
            residual[j] = abs(gap(s))

        worst = float(np.max(residual))
        if worst > FOOT_RESIDUAL_TOL:
            raise DomainError(
                f"characteristic foot of {u0.name} at t={t} misses x by {worst:.3e}"
            )
        return xi

    def burgers_characteristics(self, u0: Profile1D, x, t: float) -> np.ndarray:
        """u(x, t) solving u = u0(ξ), x = ξ + u0(ξ)·t"""
        return u0(self.foot(u0, x, t))

    def family2d(self, x, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(cos ξ, sin ξ) with x = ξ + t·cos ξ, so u² + v² = 1 everywhere"""
        xi = self.foot(self._unit_cosine, x, t, shock=1.0)
        return np.cos(xi), np.sin(xi)

    def family3d(
        self, x, t: float, fam: BlowupFamily3D
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(v, v, w) with v carried by the characteristics of v₀ and
        w = sign·√(2(v₀² − v²) + w₀²), v₀ and w₀ taken at the query point.

        The radicand is c − 2v² whenever c = 2v₀² + w₀² is constant in space;
        a negative radicand means w has left its domain of definition.
        """
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        v = self.burgers_characteristics(fam.v0, x, t)
        radicand = 2.0 * (fam.v0(x) ** 2 - v**2) + fam.w0(x) ** 2
        if np.any(radicand < 0.0):
            worst = int(np.argmin(radicand))
            raise DomainError(
                f"w radicand negative at t={t}: {float(radicand[worst]):.3e} "
                f"at x={float(x[worst]):.6g}"
            )
        w = fam.sign * np.sqrt(radicand)
        return v, v.copy(), w


characteristics_service = CharacteristicsService()
