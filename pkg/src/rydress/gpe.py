"""Nonlocal Gross-Pitaevskii dynamics on periodic spectral grids.

i dpsi/dt = [ -(hbar/2m) laplacian + g |psi|^2 + W + V_ext ] psi,
with W = U * |psi|^2 evaluated by FFT convolution against a radially
symmetric kernel. Real-time propagation uses symmetric Strang splitting
(exactly norm-preserving and time-reversible); imaginary time with periodic
renormalization relaxes to the ground state.

Units: hbar = 1, lengths um, times us, energies rad/us. The wavefunction is
normalized to the atom number, int |psi|^2 dV = N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .kernels import RadialKernel, synthetic_kernel

SECH_HWHM = float(np.arccosh(np.sqrt(2.0)))  # sech^2(x) = 1/2 at x = 0.8814


class GridKernelError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid in 1 or 2 dimensions.

    extent and points are per-axis; points must be powers of two (64+ per
    axis for production runs). spacing = extent / points.
    """

    extent: tuple
    points: tuple

    def __post_init__(self):
        extent = tuple(float(e) for e in np.atleast_1d(self.extent))
        points = tuple(int(p) for p in np.atleast_1d(self.points))
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "points", points)
        if len(extent) != len(points) or len(extent) not in (1, 2):
            raise ValueError("grid must be 1D or 2D with matching extent/points")
        for n in points:
            if n < 8 or n & (n - 1):
                raise ValueError(f"points per axis must be a power of two >= 8, got {n}")
        if any(e <= 0 for e in extent):
            raise ValueError("extent must be positive")

    @property
    def dims(self) -> int:
        return len(self.points)

    @property
    def spacing(self) -> tuple:
        return tuple(e / n for e, n in zip(self.extent, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def shape(self) -> tuple:
        return self.points

    def axes(self) -> list[np.ndarray]:
        return [(np.arange(n) - n // 2) * d for n, d in zip(self.points, self.spacing)]

    def mesh(self) -> list[np.ndarray]:
        return list(np.meshgrid(*self.axes(), indexing="ij"))

    def wavenumbers(self) -> list[np.ndarray]:
        return [2.0 * np.pi * np.fft.fftfreq(n, d) for n, d in zip(self.points, self.spacing)]

    def k_squared(self) -> np.ndarray:
        ks = self.wavenumbers()
        if self.dims == 1:
            return ks[0] ** 2
        kx, ky = np.meshgrid(*ks, indexing="ij")
        return kx**2 + ky**2

    def displacement_radius(self) -> np.ndarray:
        """|x| with the origin at index 0 and minimum-image wrapping, the
        layout needed to embed a radial kernel for circular convolution."""
        axes = []
        for n, d in zip(self.points, self.spacing):
            idx = np.fft.fftfreq(n, 1.0 / n) * d
            axes.append(idx)
        if self.dims == 1:
            return np.abs(axes[0])
        sx, sy = np.meshgrid(*axes, indexing="ij")
        return np.sqrt(sx**2 + sy**2)

    def center_radius(self) -> np.ndarray:
        m = self.mesh()
        return np.abs(m[0]) if self.dims == 1 else np.sqrt(m[0] ** 2 + m[1] ** 2)


@dataclass
class Field:
    """Complex condensate amplitude on a grid, int |psi|^2 dV = n_atoms."""

    grid: Grid
    psi: np.ndarray
    n_atoms: float

    def __post_init__(self):
        if self.psi.shape != self.grid.shape:
            raise ValueError(f"psi shape {self.psi.shape} != grid shape {self.grid.shape}")
        self.psi = np.ascontiguousarray(self.psi, dtype=complex)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.cell_volume)

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def normalized(self) -> "Field":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize a zero field")
        return Field(self.grid, self.psi * math.sqrt(self.n_atoms / n), self.n_atoms)

    def copy(self) -> "Field":
        return Field(self.grid, self.psi.copy(), self.n_atoms)


@dataclass(frozen=True)
class GridKernel:
    """Radial kernel embedded on a grid with its cached reciprocal transform."""

    grid: Grid
    radial: RadialKernel
    u_grid: np.ndarray = field(repr=False)
    u_hat: np.ndarray = field(repr=False)  # raw FFT of u_grid; convolution multiplies by dV

    def transform_at_zero(self) -> float:
        return float(np.real(self.u_hat.reshape(-1)[0]) * self.grid.cell_volume)


def tabulate_kernel(source, grid: Grid, check_consistency: bool = True) -> GridKernel:
    """Embed a radial kernel (RadialKernel, InteractionProfile or synthetic
    spec dict) on a grid and cache its FFT.

    The kernel range must fit inside half the grid extent (else its periodic
    images overlap) and the grid must resolve it: the grid sum of U is
    compared against the continuum integral to 1%.
    """
    half_extent = min(grid.extent) / 2.0
    if isinstance(source, dict):
        source = synthetic_kernel(source)
    if isinstance(source, RadialKernel):
        radial = source
    else:  # interaction profile
        if source.r[-1] < half_extent * (1.0 - 1e-9):
            raise GridKernelError(
                f"profile reaches r={source.r[-1]:.3g} um but the grid needs "
                f"kernel data out to {half_extent:.3g} um"
            )
        radial = RadialKernel.from_profile(source, r_max=half_extent)
    if radial.r_max > half_extent * (1.0 + 1e-9):
        raise GridKernelError(
            f"kernel range {radial.r_max:.3g} um exceeds half the grid extent "
            f"{half_extent:.3g} um; window the kernel or enlarge the grid"
        )
    u_grid = radial(grid.displacement_radius())
    u_hat = np.fft.fftn(u_grid)
    gk = GridKernel(grid=grid, radial=radial, u_grid=u_grid, u_hat=u_hat)
    if check_consistency:
        u0_grid = gk.transform_at_zero()
        u0_cont = radial.integral(grid.dims)
        scale = max(abs(u0_cont), np.abs(gk.u_hat).max() * grid.cell_volume * 1e-6)
        if abs(u0_grid - u0_cont) > 0.01 * scale:
            raise GridKernelError(
                f"grid kernel integral {u0_grid:.6g} deviates from the radial "
                f"integral {u0_cont:.6g} by more than 1%; refine the grid"
            )
    return gk


def mean_field(kernel: GridKernel, fld: Field) -> np.ndarray:
    """W = (U * |psi|^2)(x) by spectral convolution; the imaginary residue is
    checked below 1e-10 and discarded."""
    if kernel.grid != fld.grid:
        raise ValueError("kernel and field grids differ")
    n_hat = np.fft.fftn(fld.density())
    w = np.fft.ifftn(n_hat * kernel.u_hat) * fld.grid.cell_volume
    scale = max(np.abs(w.real).max(), 1e-300)
    if np.abs(w.imag).max() > 1e-10 * max(scale, 1.0):
        raise FloatingPointError("mean-field convolution produced a non-real result")
    return np.ascontiguousarray(w.real)


@dataclass(frozen=True)
class ExternalPotential:
    """External trap sampled on demand: none, per-axis harmonic frequencies
    (rad/us), or a flat disc with smooth walls."""

    kind: str = "none"
    omega: tuple = ()
    radius: float = 0.0
    height: float = 0.0
    wall_width: float = 1.0

    @classmethod
    def none(cls) -> "ExternalPotential":
        return cls("none")

    @classmethod
    def harmonic(cls, *omega: float) -> "ExternalPotential":
        return cls("harmonic", omega=tuple(omega))

    @classmethod
    def disc(cls, radius: float, height: float, wall_width: float = 1.0) -> "ExternalPotential":
        return cls("disc", radius=radius, height=height, wall_width=wall_width)

    def values(self, grid: Grid, hbar_over_m: float) -> np.ndarray:
        if self.kind == "none":
            return np.zeros(grid.shape)
        if self.kind == "harmonic":
            if len(self.omega) != grid.dims:
                raise ValueError("one trap frequency per axis required")
            mesh = grid.mesh()
            v = np.zeros(grid.shape)
            for om, x in zip(self.omega, mesh):
                v += om**2 * x**2 / (2.0 * hbar_over_m)
            return v
        if self.kind == "disc":
            r = grid.center_radius()
            return self.height * 0.5 * (1.0 + np.tanh((r - self.radius) / self.wall_width))
        raise ValueError(f"unknown potential kind {self.kind!r}")


def uniform_field(grid: Grid, n_atoms: float, noise: float = 0.0,
                  seed: int | None = None) -> Field:
    """Uniform condensate, optionally with relative complex Gaussian noise for
    symmetry breaking (fixed seed for reproducible pattern selection)."""
    volume = float(np.prod(grid.extent))
    amp = math.sqrt(n_atoms / volume)
    psi = np.full(grid.shape, amp, dtype=complex)
    if noise > 0:
        rng = np.random.default_rng(seed)
        psi *= 1.0 + noise * (rng.standard_normal(grid.shape)
                              + 1j * rng.standard_normal(grid.shape))
    return Field(grid, psi, n_atoms).normalized()


def initial_two_soliton(
    grid: Grid,
    amp_right: float,
    amp_left: float,
    sigma_right: float,
    sigma_left: float,
    x0: float,
    v_right: float,
    v_left: float,
    phi_right: float,
    phi_left: float,
    n_atoms: float,
    hbar_over_m: float,
) -> Field:
    """Two sech solitons at +-x0 (um) with density HWHM sigma (um), velocities
    v (um/us, converted to phase gradients k = v / (hbar/m)) and phases phi;
    the sum is normalized to n_atoms exactly.

    sech((x-x0)/w) has density HWHM 0.8814 w, so w = sigma / 0.8814.
    """
    if grid.dims != 1:
        raise ValueError("two-soliton initial state is one-dimensional")
    x = grid.axes()[0]
    w_r = sigma_right / SECH_HWHM
    w_l = sigma_left / SECH_HWHM
    k_r = v_right / hbar_over_m
    k_l = v_left / hbar_over_m
    psi = amp_right / np.cosh((x - x0) / w_r) * np.exp(1j * (k_r * x + phi_right)) \
        + amp_left / np.cosh((x + x0) / w_l) * np.exp(1j * (k_l * x + phi_left))
    return Field(grid, psi, n_atoms).normalized()


def observables(fld: Field, kernel: GridKernel | None, g: float,
                ext: ExternalPotential, hbar_over_m: float) -> dict:
    """Norm and the energy functional terms (all rad/us):
    kinetic (hbar/2m)|grad psi|^2, contact g/2 |psi|^4, nonlocal |psi|^2 W / 2,
    external V |psi|^2, plus their total."""
    dv = fld.grid.cell_volume
    npts = np.prod(fld.grid.shape)
    psi_hat = np.fft.fftn(fld.psi)
    e_kin = 0.5 * hbar_over_m * float(np.sum(fld.grid.k_squared() * np.abs(psi_hat) ** 2)) * dv / npts
    dens = fld.density()
    e_contact = 0.5 * g * float(np.sum(dens**2)) * dv
    if kernel is not None:
        w = mean_field(kernel, fld)
        e_nonlocal = 0.5 * float(np.sum(dens * w)) * dv
    else:
        e_nonlocal = 0.0
    v = ext.values(fld.grid, hbar_over_m)
    e_ext = float(np.sum(dens * v)) * dv
    return {
        "norm": fld.norm(),
        "e_kinetic": e_kin,
        "e_contact": e_contact,
        "e_nonlocal": e_nonlocal,
        "e_ext": e_ext,
        "e_total": e_kin + e_contact + e_nonlocal + e_ext,
    }


def structure_factor(fld: Field) -> np.ndarray:
    """|FT of the density fluctuation|^2 on the grid (k = 0 removed)."""
    dens = fld.density()
    n_hat = np.fft.fftn(dens - dens.mean()) * fld.grid.cell_volume
    return np.abs(n_hat) ** 2


def radial_structure_factor(fld: Field, n_bins: int = 120) -> tuple[np.ndarray, np.ndarray]:
    """Radially averaged structure factor S(|k|) for ring detection."""
    s = structure_factor(fld)
    ks = fld.grid.wavenumbers()
    if fld.grid.dims == 1:
        kmag = np.abs(ks[0])
    else:
        kx, ky = np.meshgrid(*ks, indexing="ij")
        kmag = np.sqrt(kx**2 + ky**2)
    kmax = kmag.max() * (2.0 / 3.0)  # stay clear of the dealiasing corner
    edges = np.linspace(0.0, kmax, n_bins + 1)
    which = np.digitize(kmag.reshape(-1), edges) - 1
    flat = s.reshape(-1)
    sums = np.bincount(which[(which >= 0) & (which < n_bins)],
                       weights=flat[(which >= 0) & (which < n_bins)], minlength=n_bins)
    counts = np.bincount(which[(which >= 0) & (which < n_bins)], minlength=n_bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    with np.errstate(invalid="ignore"):
        avg = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    avg[0] = 0.0  # drop the k=0 bin: mean density, not structure
    return centers, avg


def _stability_check(dt: float, fld: Field, kernel: GridKernel | None, g: float,
                     ext: ExternalPotential, hbar_over_m: float) -> None:
    dx = min(fld.grid.spacing)
    bound = dx * dx / (math.pi * hbar_over_m)
    if abs(dt) >= bound:
        raise ValueError(f"dt={dt} exceeds the kinetic stability bound {bound:.4g} us")
    w = mean_field(kernel, fld) if kernel is not None else 0.0
    pot = np.abs(w + g * fld.density() + ext.values(fld.grid, hbar_over_m))
    if abs(dt) * pot.max() >= 0.1:
        raise ValueError(
            f"dt={dt} too large for the potential scale: dt*max|W+g n+V| = "
            f"{abs(dt) * pot.max():.3g} >= 0.1"
        )


@dataclass
class Trajectory:
    times: list
    norms: list
    energies: list
    snapshots: list
    final: Field
    aborted_at: int | None = None


def evolve_real(
    fld: Field,
    kernel: GridKernel | None,
    g: float,
    ext: ExternalPotential,
    dt: float,
    steps: int,
    hbar_over_m: float,
    record_every: int = 100,
    keep_snapshots: bool = True,
    check_stability: bool = True,
) -> Trajectory:
    """Strang split-step real-time propagation.

    Each step: half kinetic (exact in reciprocal space), full nonlinear phase
    with W recomputed from the current density, half kinetic. Both factors are
    unit-modulus, so the norm is conserved to rounding; the scheme is
    time-reversible (propagating with -dt retraces the trajectory). Aborts
    with the step index on NaN/overflow.
    """
    if check_stability:
        _stability_check(dt, fld, kernel, g, ext, hbar_over_m)
    grid = fld.grid
    kin_half = np.exp(-1j * (0.5 * hbar_over_m * grid.k_squared()) * dt / 2.0)
    v_ext = ext.values(grid, hbar_over_m)
    uhat = kernel.u_hat * grid.cell_volume if kernel is not None else None

    psi = fld.psi.copy()
    n_target = fld.n_atoms
    traj = Trajectory([], [], [], [], fld)

    def record(step, psi_now):
        f = Field(grid, psi_now.copy(), n_target)
        traj.times.append(step * dt)
        traj.norms.append(f.norm())
        traj.energies.append(observables(f, kernel, g, ext, hbar_over_m))
        if keep_snapshots:
            traj.snapshots.append(f)

    record(0, psi)
    for step in range(1, steps + 1):
        psi = np.fft.ifftn(np.fft.fftn(psi) * kin_half)
        dens = np.abs(psi) ** 2
        if uhat is not None:
            w = np.real(np.fft.ifftn(np.fft.fftn(dens) * uhat))
        else:
            w = 0.0
        psi = psi * np.exp(-1j * (g * dens + w + v_ext) * dt)
        psi = np.fft.ifftn(np.fft.fftn(psi) * kin_half)
        if not np.all(np.isfinite(psi.real)) or not np.all(np.isfinite(psi.imag)):
            traj.aborted_at = step
            raise FloatingPointError(f"real-time evolution diverged at step {step}")
        if step % record_every == 0 or step == steps:
            record(step, psi)
    traj.final = Field(grid, psi, n_target)
    return traj


def evolve_imaginary(
    fld: Field,
    kernel: GridKernel | None,
    g: float,
    ext: ExternalPotential,
    dt: float,
    steps: int,
    hbar_over_m: float,
    renormalize_every: int = 10,
    energy_tol: float = 1e-9,
    check_stability: bool = True,
) -> tuple[Field, dict]:
    """Imaginary-time relaxation toward the ground state.

    The field is renormalized to n_atoms every renormalize_every steps; the
    energy functional must not increase between renormalizations (asserted).
    Converged when the relative energy change per step drops below energy_tol;
    otherwise the partial result is returned with converged=False in the info.
    """
    if check_stability:
        _stability_check(dt, fld, kernel, g, ext, hbar_over_m)
    grid = fld.grid
    kin_half = np.exp(-(0.5 * hbar_over_m * grid.k_squared()) * dt / 2.0)
    v_ext = ext.values(grid, hbar_over_m)
    uhat = kernel.u_hat * grid.cell_volume if kernel is not None else None

    psi = fld.normalized().psi.copy()
    n_target = fld.n_atoms

    def energy(psi_now):
        f = Field(grid, psi_now, n_target)
        return observables(f, kernel, g, ext, hbar_over_m)["e_total"]

    e_prev = energy(psi)
    history = [e_prev]
    converged = False
    step = 0
    for step in range(1, steps + 1):
        psi = np.fft.ifftn(np.fft.fftn(psi) * kin_half)
        dens = np.abs(psi) ** 2
        if uhat is not None:
            w = np.real(np.fft.ifftn(np.fft.fftn(dens) * uhat))
        else:
            w = 0.0
        psi = psi * np.exp(-(g * dens + w + v_ext) * dt)
        psi = np.fft.ifftn(np.fft.fftn(psi) * kin_half)
        if step % renormalize_every == 0 or step == steps:
            norm = np.sum(np.abs(psi) ** 2) * grid.cell_volume
            if not np.isfinite(norm) or norm == 0:
                raise FloatingPointError(f"imaginary-time evolution diverged at step {step}")
            psi *= math.sqrt(n_target / norm)
            e_now = energy(psi)
            if e_now > e_prev + 1e-10 * abs(e_prev) + 1e-14:
                raise AssertionError(
                    f"energy increased during imaginary-time evolution at step {step}: "
                    f"{e_prev!r} -> {e_now!r}; reduce dt"
                )
            de_per_step = abs(e_now - e_prev) / max(abs(e_now), 1e-300) / renormalize_every
            history.append(e_now)
            e_prev = e_now
            if de_per_step < energy_tol:
                converged = True
                break
    out = Field(grid, psi, n_target).normalized()
    info = {"converged": converged, "steps": step, "energy": e_prev, "energy_history": history}
    return out, info
