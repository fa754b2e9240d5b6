"""Radial interaction kernels for condensate simulations.

A RadialKernel is a sampled U(r) table with a monotone-cubic interpolant,
smoothly windowed to zero over the last tenth of its range so that periodic
grid embeddings have no wraparound tail. Kernels come from computed
interaction profiles or from synthetic forms (soft core, soft core plus
Gaussian shell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import PchipInterpolator
from scipy.special import j0

WINDOW_FRACTION = 0.1


def _cosine_window(r: np.ndarray, r_max: float, fraction: float = WINDOW_FRACTION) -> np.ndarray:
    """Smooth taper: 1 below (1-fraction) r_max, cosine to 0 at r_max."""
    start = (1.0 - fraction) * r_max
    w = np.ones_like(r)
    ramp = (r > start) & (r < r_max)
    w[ramp] = 0.5 * (1.0 + np.cos(np.pi * (r[ramp] - start) / (r_max - start)))
    w[r >= r_max] = 0.0
    return w


@dataclass(frozen=True)
class RadialKernel:
    """Tabulated radial interaction U(r) in rad/us over r in [0, r_max] um."""

    r_table: np.ndarray = field(repr=False)
    u_table: np.ndarray = field(repr=False)
    provenance: str = "table"

    def __post_init__(self):
        r = np.asarray(self.r_table, float)
        if r.ndim != 1 or len(r) < 4 or np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ValueError("kernel table needs an increasing non-negative r grid")
        if not np.all(np.isfinite(self.u_table)):
            raise ValueError("kernel table contains non-finite values")

    @property
    def r_max(self) -> float:
        return float(self.r_table[-1])

    @property
    def _interp(self) -> PchipInterpolator:
        cached = self.__dict__.get("_interp_cache")
        if cached is None:
            cached = PchipInterpolator(self.r_table, self.u_table, extrapolate=False)
            self.__dict__["_interp_cache"] = cached
        return cached

    def __call__(self, r) -> np.ndarray:
        """Interpolated U(r); zero beyond the table range."""
        r = np.asarray(r, dtype=float)
        out = self._interp(np.clip(r, self.r_table[0], self.r_max))
        return np.where(r > self.r_max, 0.0, out)

    def fourier_radial(self, k, dims: int, n_quad: int = 4096) -> np.ndarray:
        """Isotropic Fourier transform U~(k) = int U(r) e^{-i k.x} d^dims x.

        1D: 2 int U cos(kr) dr; 2D: 2 pi int U J0(kr) r dr;
        3D: 4 pi int U sinc(kr) r^2 dr. Real and even in k by construction.
        """
        k = np.atleast_1d(np.asarray(k, dtype=float))
        r = np.linspace(self.r_table[0], self.r_max, n_quad)
        u = self(r)
        kr = np.abs(k)[:, None] * r[None, :]
        if dims == 1:
            integ = u[None, :] * np.cos(kr)
            vals = 2.0 * simpson(integ, x=r, axis=1)
        elif dims == 2:
            integ = u[None, :] * j0(kr) * r[None, :]
            vals = 2.0 * math.pi * simpson(integ, x=r, axis=1)
        elif dims == 3:
            integ = u[None, :] * np.sinc(kr / math.pi) * r[None, :] ** 2
            vals = 4.0 * math.pi * simpson(integ, x=r, axis=1)
        else:
            raise ValueError("dims must be 1, 2 or 3")
        return vals

    def integral(self, dims: int) -> float:
        """int U dV in the given dimension (equals U~(0))."""
        return float(self.fourier_radial(np.array([0.0]), dims)[0])

    def windowed(self, r_max: float | None = None, fraction: float = WINDOW_FRACTION) -> "RadialKernel":
        """Copy with the tail forced smoothly to zero at r_max."""
        r_max = self.r_max if r_max is None else min(r_max, self.r_max)
        mask = self.r_table <= r_max
        r = self.r_table[mask]
        u = self.u_table[mask] * _cosine_window(r, r_max, fraction)
        return RadialKernel(r, u, provenance=self.provenance + "+window")

    @classmethod
    def from_profile(cls, profile, r_max: float | None = None, points: int = 800) -> "RadialKernel":
        """Kernel from a computed interaction profile: the plateau value is
        continued down to r = 0 and the tail is windowed to zero."""
        u_interp, _ = profile.interpolators()
        r_hi = profile.r[-1] if r_max is None else min(r_max, profile.r[-1])
        r = np.linspace(0.0, r_hi, points)
        u = np.empty_like(r)
        inside = r < profile.r[0]
        u[inside] = profile.u[0]
        u[~inside] = u_interp(r[~inside])
        u *= _cosine_window(r, r_hi)
        return cls(r, u, provenance="profile")

    @classmethod
    def soft_core(cls, u0: float, r_core: float, r_max: float | None = None,
                  points: int = 800) -> "RadialKernel":
        """Plateau kernel u0 / (1 + (r/r_core)^6), windowed at r_max
        (default 4 r_core)."""
        r_max = 4.0 * r_core if r_max is None else r_max
        r = np.linspace(0.0, r_max, points)
        u = u0 / (1.0 + (r / r_core) ** 6)
        u *= _cosine_window(r, r_max)
        return cls(r, u, provenance=f"soft_core(u0={u0:.6g}, r_core={r_core:.6g})")

    @classmethod
    def soft_core_gauss(cls, u0: float, r_core: float, peak: float, r_peak: float,
                        width: float, r_max: float | None = None,
                        points: int = 800) -> "RadialKernel":
        """Plateau plus Gaussian shell:
        u0/(1+(r/r_core)^6) + peak * exp(-(r-r_peak)^2 / (2 width^2))."""
        r_max = max(4.0 * r_core, r_peak + 6.0 * width) if r_max is None else r_max
        r = np.linspace(0.0, r_max, points)
        u = u0 / (1.0 + (r / r_core) ** 6) + peak * np.exp(-((r - r_peak) ** 2) / (2.0 * width**2))
        u *= _cosine_window(r, r_max)
        return cls(r, u, provenance=f"soft_core_gauss(u0={u0:.6g}, r_core={r_core:.6g}, "
                                    f"peak={peak:.6g}, r_peak={r_peak:.6g}, width={width:.6g})")

    @classmethod
    def gaussian(cls, u0: float, width: float, r_max: float | None = None,
                 points: int = 800) -> "RadialKernel":
        r_max = 8.0 * width if r_max is None else r_max
        r = np.linspace(0.0, r_max, points)
        u = u0 * np.exp(-(r**2) / (2.0 * width**2))
        u *= _cosine_window(r, r_max)
        return cls(r, u, provenance=f"gaussian(u0={u0:.6g}, width={width:.6g})")


def synthetic_kernel(spec: dict) -> RadialKernel:
    """Build a synthetic kernel from a flat config mapping with a 'form' key:
    soft_core, soft_core_gauss or gaussian; strengths in rad/us, lengths um."""
    form = spec.get("form")
    args = {k: v for k, v in spec.items() if k != "form"}
    builders = {
        "soft_core": RadialKernel.soft_core,
        "soft_core_gauss": RadialKernel.soft_core_gauss,
        "gaussian": RadialKernel.gaussian,
    }
    if form not in builders:
        raise ValueError(f"unknown kernel form {form!r}; expected one of {sorted(builders)}")
    return builders[form](**args)
