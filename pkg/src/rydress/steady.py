"""Steady states of the dressing master equation and derived observables.

The effective pair interaction is U(r) = Ubar(r) - Ubar(inf) with
Ubar(r) = Tr[rho_pair (H_i + H_j + V_ij)] evaluated in the unique steady
state at separation r, and Ubar(inf) computed from the product of
single-atom steady states (the generator is exactly separable at V = 0).
The loss rate per atom is Gamma = Tr[rho_1 (gamma_p |p><p| + gamma_r |e><e|)]
with rho_1 the single-atom reduction of the pair steady state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    DensityMatrix,
    Liouvillian,
    build_single_hamiltonian,
    build_single_liouvillian,
    jump_operators,
    liouvillian_matrix,
    loss_operator,
    reduce_pair_density,
    sigma,
    vdw_potential,
    E,
    G,
    P,
)
from .params import DressingParams

RESIDUAL_TOL = 1e-10  # residual bound, relative to the largest rate
DEGENERACY_RATIO = 1e6  # smallest vs second-smallest singular value


class DegenerateSteadyStateError(RuntimeError):
    """The generator has a steady-state manifold of dimension > 1 (decoupled
    sectors, e.g. omega1 = 0 with no decay into them)."""


@dataclass(frozen=True)
class SteadyStateSolution:
    rho: DensityMatrix
    residual: float
    solver_info: dict = field(default_factory=dict)


def _trace_row(dim: int) -> np.ndarray:
    row = np.zeros(dim * dim, dtype=complex)
    row[:: dim + 1] = 1.0
    return row


def _solve_trace_constrained(matrix: np.ndarray, dim: int) -> np.ndarray:
    a = matrix.copy()
    a[0, :] = _trace_row(dim)
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    x = np.linalg.solve(a, b)
    # one round of iterative refinement
    x += np.linalg.solve(a, b - a @ x)
    return x


def _check_nondegenerate(s: np.ndarray) -> None:
    """Degeneracy test on the singular spectrum: the exact steady state pins
    the smallest singular value at rounding level (~eps * s_max), so a second
    one below 1e6 x that level (i.e. below ~1e-10 * s_max) signals a
    steady-state manifold of dimension > 1."""
    floor = max(s[-1], np.finfo(float).eps * s[0])
    if s[-2] < min(DEGENERACY_RATIO * floor, 1e-10 * s[0]):
        raise DegenerateSteadyStateError(
            f"steady-state manifold is degenerate (singular values {s[-2]:.3e}, {s[-1]:.3e})"
        )


def _svd_null_vector(matrix: np.ndarray, dim: int, s=None, vh=None) -> np.ndarray:
    if vh is None:
        _, s, vh = np.linalg.svd(matrix)
    _check_nondegenerate(s)
    vec = vh[-1].conj()
    rho = vec.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise DegenerateSteadyStateError("null vector is traceless; steady state not unique")
    return (rho / tr).reshape(-1)


def steady_state(lv: Liouvillian, params: DressingParams | None = None) -> SteadyStateSolution:
    """Solve L(rho) = 0 with Tr rho = 1.

    The vectorized linear system is solved with one row replaced by the trace
    constraint, refined once; if the result is inconsistent (near-singular
    system) the smallest-singular-vector extraction takes over, which also
    detects genuinely degenerate steady-state manifolds and raises
    :class:`DegenerateSteadyStateError`.
    """
    dim = lv.dim
    scale = max(np.abs(lv.matrix).max(), 1.0)
    tol = RESIDUAL_TOL * (params.max_rate if params is not None else scale)
    _, s, vh = np.linalg.svd(lv.matrix)
    _check_nondegenerate(s)
    info = {"method": "lu", "singular_values": (float(s[-2]), float(s[-1]))}
    try:
        x = _solve_trace_constrained(lv.matrix, dim)
        residual = float(np.linalg.norm(lv.matrix @ x))
        bad = not np.isfinite(residual) or residual > tol
    except np.linalg.LinAlgError:
        bad = True
        residual = np.inf
    if bad:
        x = _svd_null_vector(lv.matrix, dim, s, vh)
        residual = float(np.linalg.norm(lv.matrix @ x))
        info["method"] = "svd"
    rho = x.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.real(np.trace(rho))
    eigmin = float(np.linalg.eigvalsh(rho).min())
    if eigmin < DensityMatrix.EIGENVALUE_FLOOR:
        x = _svd_null_vector(lv.matrix, dim, s, vh)
        rho = x.reshape(dim, dim)
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.real(np.trace(rho))
        residual = float(np.linalg.norm(lv.matrix @ x))
        eigmin = float(np.linalg.eigvalsh(rho).min())
        info["method"] = "svd"
    info.update(residual=residual, min_eigenvalue=eigmin)
    return SteadyStateSolution(DensityMatrix(rho).validate(), residual, info)


class PairInteraction:
    """Cached evaluator of pair steady states over separation grids.

    Splits the two-atom generator into an r-independent part and the
    van-der-Waals commutator (diagonal in the vectorized basis), so a profile
    over many separations costs one dense build plus batched 81x81 solves.
    """

    def __init__(self, params: DressingParams):
        self.params = params
        h1 = build_single_hamiltonian(params)
        i3 = np.eye(3)
        self.h2 = np.kron(h1, i3) + np.kron(i3, h1)
        jumps = []
        for j in jump_operators(params):
            jumps.append(np.kron(j, i3))
            jumps.append(np.kron(i3, j))
        self.l0 = liouvillian_matrix(self.h2, jumps)
        pee = np.kron(sigma(E, E), sigma(E, E))
        i9 = np.eye(9)
        self.int_diag = np.diag(-1j * (np.kron(pee, i9) - np.kron(i9, pee.T))).copy()
        self.loss_op = loss_operator(params)

        single = steady_state(build_single_liouvillian(params), params)
        self.rho_single = single.rho
        self.u_infinity = 2.0 * self.rho_single.expectation(h1)
        self.loss_infinity = self.rho_single.expectation(self.loss_op)

    def liouvillian(self, r: float) -> Liouvillian:
        v = vdw_potential(r, self.params.c6)
        return Liouvillian(9, self.l0 + np.diag(v * self.int_diag))

    def steady_rhos(self, r_values: np.ndarray) -> np.ndarray:
        """Batched pair steady states, shape (n, 9, 9)."""
        r_values = np.atleast_1d(np.asarray(r_values, dtype=float))
        v = vdw_potential(r_values, self.params.c6)
        n = len(r_values)
        mats = np.broadcast_to(self.l0, (n, 81, 81)).copy()
        idx = np.arange(81)
        mats[:, idx, idx] += np.atleast_1d(v)[:, None] * self.int_diag[None, :]
        tr = _trace_row(9)
        mats[:, 0, :] = tr
        rhs = np.zeros((n, 81), dtype=complex)
        rhs[:, 0] = 1.0
        x = np.linalg.solve(mats, rhs[..., None])[..., 0]
        rhos = x.reshape(n, 9, 9)
        rhos = 0.5 * (rhos + np.conj(np.swapaxes(rhos, 1, 2)))
        traces = np.real(np.einsum("nii->n", rhos))
        return rhos / traces[:, None, None]

    def interaction_and_loss(self, r_values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Effective interaction U(r) (rad/us) and loss rate per atom (rad/us)."""
        r_values = np.atleast_1d(np.asarray(r_values, dtype=float))
        rhos = self.steady_rhos(r_values)
        v = vdw_potential(r_values, self.params.c6)
        ubar = np.real(np.einsum("nij,ji->n", rhos, self.h2)) + v * np.real(rhos[:, 8, 8])
        rho1 = np.einsum("nikjk->nij", rhos.reshape(-1, 3, 3, 3, 3))
        gam = np.real(np.einsum("nij,ji->n", rho1, self.loss_op))
        return ubar - self.u_infinity, gam


def pair_steady_state(params: DressingParams, r: float) -> SteadyStateSolution:
    pi = PairInteraction(params)
    sol = steady_state(pi.liouvillian(r), params)
    return sol


def effective_interaction(params: DressingParams, r: float) -> float:
    """U(r) = Tr[rho_ss (H_i + H_j + V)] - Ubar(inf), in rad/us."""
    if r <= 0:
        raise ValueError("separation must be positive")
    pi = PairInteraction(params)
    u, _ = pi.interaction_and_loss(np.array([r]))
    return float(u[0])


def loss_rate(params: DressingParams, r: float) -> float:
    """Loss rate per atom at separation r, in rad/us (angular; divide by 2 pi
    for the spectroscopic value in MHz)."""
    if r <= 0:
        raise ValueError("separation must be positive")
    pi = PairInteraction(params)
    _, g = pi.interaction_and_loss(np.array([r]))
    return float(g[0])


def analytic_lightshift(rho_pair: DensityMatrix, params: DressingParams, r: float) -> float:
    """Pair light shift reconstructed from matrix elements.

    Ubar = 2 [ omega1/2 (rho_gp + rho_pg) + omega2/2 (rho_pe + rho_ep)
               - delta rho_pp ] + V(r) rho_ee,ee,
    with single-atom elements taken from the reduced pair state. Identical to
    the trace-based Ubar(r) by linearity.
    """
    red = reduce_pair_density(rho_pair.entries)
    rho_gp_plus = np.real(red[G, P] + red[P, G])
    rho_pe_plus = np.real(red[P, E] + red[E, P])
    rho_pp = np.real(red[P, P])
    rho_eeee = np.real(rho_pair.entries[8, 8])
    return float(
        2.0 * (0.5 * params.omega1 * rho_gp_plus + 0.5 * params.omega2 * rho_pe_plus
               - params.delta * rho_pp)
        + vdw_potential(r, params.c6) * rho_eeee
    )


@dataclass(frozen=True)
class FlaggedValue:
    """Approximate analytic value plus a validity flag (advisory when the
    derivation's regime assumptions do not hold)."""

    value: float
    valid: bool
    note: str = ""

    def __float__(self) -> float:
        return self.value


def _decoherence_scale(params: DressingParams) -> float:
    return max(params.gamma1, params.gamma2, params.gamma_p, params.gamma_r)


def analytic_rho_pe(rho_pp: float, params: DressingParams) -> FlaggedValue:
    """Single-atom coherence sum rho_pe + rho_ep from the intermediate
    population: (4 delta / omega2) * gamma_p / (gamma2 + gamma_p) * rho_pp.
    Valid while decoherence stays below the transparency bandwidth."""
    value = 4.0 * params.delta / params.omega2 * params.gamma_p / (params.gamma2 + params.gamma_p) * rho_pp
    valid = _decoherence_scale(params) < params.eit_bandwidth
    note = "" if valid else "decoherence exceeds the transparency bandwidth"
    return FlaggedValue(float(value), valid, note)


def analytic_rho_ge(rho_pp: float, rho_ee: float, params: DressingParams) -> FlaggedValue:
    """Two-photon coherence sum rho_ge + rho_eg, leading term
    -(2 omega2/omega1) gamma_p rho_pp / (gamma_lock + gamma_r). Collapses when
    unlocked noise dominates, signalling transparency breakdown."""
    if params.omega1 == 0:
        raise ValueError("rho_ge estimate needs omega1 > 0")
    denom = params.gamma_lock + params.gamma_r
    value = -(2.0 * params.omega2 / params.omega1) * params.gamma_p * rho_pp / denom
    valid = _decoherence_scale(params) < params.eit_bandwidth
    note = "" if valid else "decoherence exceeds the transparency bandwidth"
    return FlaggedValue(float(value), valid, note)


def collective_shift_model(rho_pp: float, params: DressingParams) -> FlaggedValue:
    """Soft-core light-shift model delta * rho_pp * (gamma_p - gamma2)/(gamma_p + gamma2),
    applicable at omega2 = 2 delta: starts at delta*rho_pp for quiet lasers,
    crosses zero at gamma2 = gamma_p, saturates at -delta*rho_pp."""
    value = params.delta * rho_pp * (params.gamma_p - params.gamma2) / (params.gamma_p + params.gamma2)
    ratio = params.omega2 / (2.0 * abs(params.delta))
    valid = abs(ratio - 1.0) < 0.05
    note = "" if valid else f"model derived at omega2/2|delta| = 1, here {ratio:.3g}"
    return FlaggedValue(float(value), valid, note)
