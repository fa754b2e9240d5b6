"""Bogoliubov excitations over a uniform background and roton instabilities.

omega_b^2(k) = eps_k (eps_k + 2 rho g + 2 rho U~(k)) with the free-particle
energy eps_k = (hbar/2m) k^2. Wherever omega_b^2 < 0 the mode grows at the
rate beta = sqrt(-omega_b^2); each contiguous unstable band imprints a
density modulation with lattice constant 2 pi / k at the fastest-growing k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import RadialKernel


def kernel_fourier(kernel: RadialKernel, k_grid: np.ndarray, dims: int) -> np.ndarray:
    """Isotropic transform U~(k) of a windowed radial kernel, real and even;
    the transform dimension must match the simulation dimension."""
    tail = np.abs(kernel.u_table[-max(3, len(kernel.u_table) // 100):]).max()
    body = np.abs(kernel.u_table).max()
    if body > 0 and tail > 1e-6 * body:
        raise ValueError("kernel tail has not decayed; window it before transforming")
    return kernel.fourier_radial(np.asarray(k_grid, dtype=float), dims)


@dataclass(frozen=True)
class RotonBand:
    k_lo: float
    k_hi: float
    k_roton: float
    beta: float

    @property
    def lattice_a(self) -> float:
        return 2.0 * np.pi / self.k_roton


@dataclass(frozen=True)
class BogoliubovSpectrum:
    k_grid: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)  # complex dispersion, rad/us
    omega_sq: np.ndarray = field(repr=False)
    rho: float
    g: float
    dims: int

    @property
    def beta(self) -> np.ndarray:
        return self.omega.imag

    def rotons(self) -> list[RotonBand]:
        return roton_instabilities(self)


def spectrum(
    kernel: RadialKernel | None,
    rho: float,
    g: float,
    hbar_over_m: float,
    k_grid: np.ndarray,
    dims: int,
    u_tilde: np.ndarray | None = None,
) -> BogoliubovSpectrum:
    """Dispersion over a uniform background of density rho (um^-dims).

    omega is the principal square root of omega_b^2: real on stable branches,
    purely imaginary (growth rate beta) inside instability bands.
    """
    if rho <= 0:
        raise ValueError("background density must be positive")
    k_grid = np.asarray(k_grid, dtype=float)
    if u_tilde is None:
        u_tilde = kernel_fourier(kernel, k_grid, dims) if kernel is not None else np.zeros_like(k_grid)
    eps = 0.5 * hbar_over_m * k_grid**2
    omega_sq = eps * (eps + 2.0 * rho * g + 2.0 * rho * u_tilde)
    omega = np.sqrt(omega_sq.astype(complex))
    return BogoliubovSpectrum(k_grid=k_grid, omega=omega, omega_sq=omega_sq,
                              rho=rho, g=g, dims=dims)


def _refine_peak(k: np.ndarray, beta: np.ndarray, idx: int) -> tuple[float, float]:
    if idx <= 0 or idx >= len(k) - 1:
        return float(k[idx]), float(beta[idx])
    x = k[idx - 1: idx + 2] - k[idx]
    y = beta[idx - 1: idx + 2]
    c = np.polyfit(x, y, 2)
    if c[0] >= 0:
        return float(k[idx]), float(beta[idx])
    dx = float(np.clip(-c[1] / (2 * c[0]), x[0], x[2]))
    return float(k[idx] + dx), float(np.polyval(c, dx))


def roton_instabilities(spec: BogoliubovSpectrum) -> list[RotonBand]:
    """Maximal contiguous unstable k-intervals (k > 0), each reported at its
    fastest-growing wavenumber (quadratically refined), sorted by growth rate
    descending. An empty list is a valid, stable result."""
    k = spec.k_grid
    beta = spec.omega.imag
    unstable = (spec.omega_sq < 0) & (k > 0)
    bands: list[RotonBand] = []
    i = 0
    n = len(k)
    while i < n:
        if not unstable[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and unstable[j + 1]:
            j += 1
        seg = slice(i, j + 1)
        idx = i + int(np.argmax(beta[seg]))
        k_rot, b = _refine_peak(k, beta, idx)
        bands.append(RotonBand(k_lo=float(k[i]), k_hi=float(k[j]), k_roton=k_rot, beta=b))
        i = j + 1
    bands.sort(key=lambda b: -b.beta)
    return bands
