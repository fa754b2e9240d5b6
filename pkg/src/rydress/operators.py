"""Hamiltonians, jump operators and Liouvillian superoperators.

Basis ordering is (g, p, e) = (0, 1, 2) for one atom; the pair basis is the
row-major tensor order |a b> -> 3*a + b. Density matrices are vectorized
row-major, vec(rho)[3*i + j] = rho[i, j], so that
vec(A rho B) = (A kron B^T) vec(rho).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import DressingParams, derive_lock_rates

G, P, E = 0, 1, 2  # single-atom basis indices


def sigma(a: int, b: int, dim: int = 3) -> np.ndarray:
    """Transition operator |a><b| as a dense complex matrix."""
    m = np.zeros((dim, dim), dtype=complex)
    m[a, b] = 1.0
    return m


def build_single_hamiltonian(params: DressingParams) -> np.ndarray:
    """Rotating-frame single-atom Hamiltonian.

    H = omega1/2 (|g><p| + h.c.) + omega2/2 (|e><p| + h.c.) - delta |p><p|.
    The state omega2|g> - omega1|e> is annihilated by H (dark state).
    """
    h = np.zeros((3, 3), dtype=complex)
    h[G, P] = h[P, G] = 0.5 * params.omega1
    h[E, P] = h[P, E] = 0.5 * params.omega2
    h[P, P] = -params.delta
    return h


def jump_operators(params: DressingParams) -> list[np.ndarray]:
    """Single-atom Lindblad jump operators.

    Decay: sqrt(gamma_p)|g><p| and sqrt(gamma_r)|p><e| (the Rydberg state
    decays into the intermediate state, not directly to the ground state).
    Laser noise: projector dephasing sqrt(Gamma_aa)|a><a| with the rates of
    :func:`rydress.params.derive_lock_rates`.
    """
    ggg, gpp, gee = derive_lock_rates(params)
    ops = []
    for rate, op in [
        (params.gamma_p, sigma(G, P)),
        (params.gamma_r, sigma(P, E)),
        (ggg, sigma(G, G)),
        (gpp, sigma(P, P)),
        (gee, sigma(E, E)),
    ]:
        if rate > 0:
            ops.append(np.sqrt(rate) * op)
    return ops


def vdw_potential(r: float, c6: float) -> float:
    """Van-der-Waals pair interaction c6 / r^6 (rad/us) at separation r (um)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("van-der-Waals potential diverges at r <= 0")
    out = c6 / r**6
    return float(out) if out.ndim == 0 else out


def loss_operator(params: DressingParams) -> np.ndarray:
    """Single-atom loss observable gamma_p |p><p| + gamma_r |e><e|."""
    return params.gamma_p * sigma(P, P) + params.gamma_r * sigma(E, E)


def liouvillian_matrix(hamiltonian: np.ndarray, jumps: list[np.ndarray]) -> np.ndarray:
    """Dense superoperator of d rho/dt = -i[H, rho] + sum_k D[J_k] rho,
    acting on row-major vectorized density matrices."""
    d = hamiltonian.shape[0]
    ident = np.eye(d)
    lv = -1j * (np.kron(hamiltonian, ident) - np.kron(ident, hamiltonian.T))
    for j in jumps:
        jdj = j.conj().T @ j
        lv += np.kron(j, j.conj()) - 0.5 * (np.kron(jdj, ident) + np.kron(ident, jdj.T))
    return lv


@dataclass(frozen=True)
class Liouvillian:
    """Vectorized generator of a Lindblad semigroup on a dim-level system."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        d2 = self.dim * self.dim
        if self.matrix.shape != (d2, d2):
            raise ValueError(f"matrix shape {self.matrix.shape} != ({d2}, {d2})")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return (self.matrix @ rho.reshape(-1)).reshape(self.dim, self.dim)

    def trace_preservation_residual(self, rho: np.ndarray) -> float:
        return abs(np.trace(self.apply(rho)))


def build_single_liouvillian(params: DressingParams) -> Liouvillian:
    h = build_single_hamiltonian(params)
    return Liouvillian(3, liouvillian_matrix(h, jump_operators(params)))


def pair_hamiltonian(params: DressingParams, r: float) -> np.ndarray:
    """H_i + H_j + V_ij on the 9-dimensional pair space."""
    h1 = build_single_hamiltonian(params)
    i3 = np.eye(3)
    h2 = np.kron(h1, i3) + np.kron(i3, h1)
    h2 += vdw_potential(r, params.c6) * np.kron(sigma(E, E), sigma(E, E))
    return h2


def build_two_atom_liouvillian(params: DressingParams, r: float) -> Liouvillian:
    """Two-atom generator: independent single-atom drives and dissipators plus
    the coherent van-der-Waals term on the |ee> sector. Three-body terms are
    truncated. At large r this is exactly the tensor sum of two single-atom
    generators."""
    if r <= 0:
        raise ValueError("separation r must be positive")
    i3 = np.eye(3)
    jumps = []
    for j in jump_operators(params):
        jumps.append(np.kron(j, i3))
        jumps.append(np.kron(i3, j))
    return Liouvillian(9, liouvillian_matrix(pair_hamiltonian(params, r), jumps))


def reduce_pair_density(rho_pair: np.ndarray, atom: int = 0) -> np.ndarray:
    """Partial trace of a 9x9 pair density matrix down to one atom."""
    rr = rho_pair.reshape(3, 3, 3, 3)
    if atom == 0:
        return np.einsum("ikjk->ij", rr)
    return np.einsum("kikj->ij", rr)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian trace-one matrix over a 3-level atom or 9-level pair."""

    entries: np.ndarray = field(repr=False)

    HERMITICITY_TOL = 1e-12
    TRACE_TOL = 1e-10
    EIGENVALUE_FLOOR = -1e-10

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] not in (3, 9):
            raise ValueError("density matrix must be 3x3 or 9x9")

    def validate(self) -> "DensityMatrix":
        e = self.entries
        scale = max(np.abs(e).max(), 1.0)
        if np.abs(e - e.conj().T).max() > self.HERMITICITY_TOL * scale:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(e) - 1.0) > self.TRACE_TOL:
            raise ValueError(f"trace {np.trace(e)} != 1")
        if np.linalg.eigvalsh(e).min() < self.EIGENVALUE_FLOOR:
            raise ValueError("density matrix has a significantly negative eigenvalue")
        return self

    def expectation(self, op: np.ndarray) -> float:
        return float(np.real(np.trace(self.entries @ op)))

    def element(self, a: int, b: int) -> complex:
        return complex(self.entries[a, b])

    def reduced(self, atom: int = 0) -> "DensityMatrix":
        if self.dim != 9:
            raise ValueError("reduction only defined for pair matrices")
        return DensityMatrix(reduce_pair_density(self.entries, atom))
