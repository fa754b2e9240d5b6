"""Independent numerical oracles used by the test suite only.

These deliberately avoid the solver paths they check: the master equation is
integrated in time with classical RK4 (not solved linearly), Fourier
transforms are done by dense quadrature (not FFT), and pair energies are
summed by explicit loops.
"""

from __future__ import annotations

import numpy as np


def rk4_step_matrix(matrix: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 update for x' = A x, as a matrix:
    I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24."""
    dim = matrix.shape[0]
    ha = dt * matrix
    out = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for k in (1, 2, 3, 4):
        term = term @ ha / k
        out = out + term
    return out


def integrate_master_rk4(
    matrix: np.ndarray,
    rho0: np.ndarray,
    residual_tol: float = 1e-12,
    dt: float | None = None,
    max_doublings: int = 42,
) -> np.ndarray:
    """Long-time RK4 integration of d vec(rho)/dt = L vec(rho).

    The RK4 update of a linear autonomous system is a fixed matrix; n steps
    are the n-th matrix power, applied here by repeated squaring so that very
    long horizons stay cheap while remaining the exact RK4 iteration. Stops
    once ||L rho|| < residual_tol (trace renormalized on the way out).
    """
    dim = rho0.shape[0]
    if dt is None:
        dt = 1.0 / max(np.abs(matrix).sum(axis=1).max(), 1e-30)
    x = rho0.reshape(-1).astype(complex)
    stepper = rk4_step_matrix(matrix, dt)
    for _ in range(max_doublings):
        x = stepper @ x
        tr = x[:: int(np.sqrt(len(x))) + 1].sum()
        x = x / tr
        if np.linalg.norm(matrix @ x) < residual_tol:
            break
        stepper = stepper @ stepper  # doubles the number of RK4 steps applied
    rho = x.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def quadrature_fourier_radial(u_of_r, r_max: float, k: np.ndarray, dims: int,
                              n: int = 200_001) -> np.ndarray:
    """Isotropic Fourier transform by brute-force trapezoid quadrature."""
    r = np.linspace(0.0, r_max, n)
    u = u_of_r(r)
    k = np.atleast_1d(k)
    out = np.empty(len(k))
    for i, ki in enumerate(k):
        if dims == 1:
            out[i] = 2.0 * np.trapezoid(u * np.cos(ki * r), r)
        elif dims == 2:
            from scipy.special import j0
            out[i] = 2.0 * np.pi * np.trapezoid(u * j0(ki * r) * r, r)
        else:
            out[i] = 4.0 * np.pi * np.trapezoid(u * np.sinc(ki * r / np.pi) * r**2, r)
    return out


def brute_force_pair_sum(positions: np.ndarray, u_of_r) -> float:
    """Explicit double loop over pairs."""
    total = 0.0
    n = len(positions)
    for i in range(n):
        for j in range(i + 1, n):
            total += float(u_of_r(np.linalg.norm(positions[i] - positions[j])))
    return total


def gaussian_quartic_integral(sigma_sd: float, n_atoms: float, half_box: float = None,
                              points: int = 401) -> float:
    """int |psi|^4 d^3x for a Gaussian cloud of density std sigma_sd holding
    n_atoms, by direct 3D quadrature on a radial grid."""
    if half_box is None:
        half_box = 8.0 * sigma_sd
    r = np.linspace(0, half_box, points)
    dens = n_atoms * np.exp(-(r**2) / (2 * sigma_sd**2)) / (2 * np.pi * sigma_sd**2) ** 1.5
    return float(np.trapezoid(4.0 * np.pi * r**2 * dens**2, r))
