"""Monte-Carlo energetics of 3D solitons and bi-soliton molecules.

Clouds are isotropic Gaussians parameterized by the density HWHM. Energies
(all rad/us, hbar = 1):
  kinetic   N * 3 (hbar/m) / (8 sigma_sd^2)   (Gaussian wavepacket),
  contact   from the Gaussian-ansatz overlap integral of g |psi|^4 / 2,
  dressing  sum over pairs of the tabulated kernel, averaged over sampled
            clouds with the Marsaglia polar Gaussian sampler.
The stability window of a molecule combines the smallest atom number that
self-traps with the largest one that survives two oscillation periods at 37%
Poisson probability (Nـmax Gamma t2 = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from .kernels import RadialKernel

HWHM_TO_SD = 1.0 / math.sqrt(2.0 * math.log(2.0))


def marsaglia_normals(count: int, rng: np.random.Generator) -> np.ndarray:
    """Standard normal variates from the Marsaglia polar method: uniform pairs
    on the square, rejected outside the open unit disc, scaled by
    sqrt(-2 ln s / s). Deterministic for a given generator state."""
    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        batch = max(((need + 1) // 2) * 2, 64)
        u = rng.uniform(-1.0, 1.0, size=batch)
        v = rng.uniform(-1.0, 1.0, size=batch)
        s = u * u + v * v
        ok = (s < 1.0) & (s > 0.0)
        f = np.sqrt(-2.0 * np.log(s[ok]) / s[ok])
        pairs = np.empty(2 * int(ok.sum()))
        pairs[0::2] = u[ok] * f
        pairs[1::2] = v[ok] * f
        take = min(len(pairs), need)
        out[filled: filled + take] = pairs[:take]
        filled += take
    return out


@dataclass(frozen=True)
class CloudSpec:
    """Isotropic 3D Gaussian cloud: atom count, density HWHM (um), center."""

    n_atoms: int
    sigma: float
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("cloud needs at least one atom")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def sigma_sd(self) -> float:
        return self.sigma * HWHM_TO_SD


def sample_gaussian_cloud(spec: CloudSpec, seed) -> np.ndarray:
    """(n_atoms, 3) positions, Marsaglia-sampled, deterministic per seed."""
    rng = np.random.default_rng(seed)
    z = marsaglia_normals(3 * spec.n_atoms, rng).reshape(spec.n_atoms, 3)
    return z * spec.sigma_sd + np.asarray(spec.center, dtype=float)


def dressing_energy(positions: np.ndarray, kernel: RadialKernel,
                    method: str = "bruteforce") -> float:
    """Pairwise interaction energy sum_{i<j} U(r_ij) (rad/us).

    'bruteforce' sums every pair; 'celllist' buckets positions into cells of
    the kernel range and sums only neighboring cells (pairs farther than the
    windowed range contribute exactly zero). Both paths agree to rounding.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[0] < 2 or positions.shape[1] != 3:
        raise ValueError("need at least two 3D positions")
    if method == "bruteforce":
        return float(np.sum(kernel(pdist(positions))))
    if method != "celllist":
        raise ValueError(f"unknown method {method!r}")
    cell = kernel.r_max
    keys = np.floor(positions / cell).astype(np.int64)
    buckets: dict[tuple, np.ndarray] = {}
    for i, key in enumerate(map(tuple, keys)):
        buckets.setdefault(key, []).append(i)
    buckets = {k: np.array(v) for k, v in buckets.items()}
    offsets = [(a, b, c) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1)]
    total = 0.0
    for key in sorted(buckets):
        own = buckets[key]
        if len(own) > 1:
            total += float(np.sum(kernel(pdist(positions[own]))))
        for off in offsets:
            other = (key[0] + off[0], key[1] + off[1], key[2] + off[2])
            if other <= key or other not in buckets:
                continue
            d = np.linalg.norm(positions[own][:, None, :] - positions[buckets[other]][None, :, :], axis=-1)
            total += float(np.sum(kernel(d.reshape(-1))))
    return total


def kinetic_energy(n_atoms: float, sigma_hwhm: float, hbar_over_m: float) -> float:
    """Quantum kinetic energy of n Gaussian wavepackets of density HWHM sigma:
    n * 3 (hbar/m) / (8 sigma_sd^2)."""
    sd = sigma_hwhm * HWHM_TO_SD
    return n_atoms * 3.0 * hbar_over_m / (8.0 * sd * sd)


def contact_energy(n_atoms: float, sigma_hwhm: float, g: float) -> float:
    """(g/2) int |psi|^4 for a Gaussian cloud: g n^2 / (16 pi^{3/2} sigma_sd^3)."""
    sd = sigma_hwhm * HWHM_TO_SD
    return g * n_atoms**2 / (16.0 * math.pi**1.5 * sd**3)


def molecule_contact_energy(n_atoms_total: float, sigma_hwhm: float, g: float,
                            distance: float) -> float:
    """Contact energy of two Gaussian clouds of n/2 atoms at separation D,
    including the overlap cross term: at D=0 it reduces to the single-cloud
    expression with n atoms, at D -> inf to twice the isolated value."""
    sd = sigma_hwhm * HWHM_TO_SD
    n_half = 0.5 * n_atoms_total
    base = g * n_half**2 / (8.0 * math.pi**1.5 * sd**3)
    if math.isinf(distance):
        return base
    return base * (1.0 + math.exp(-(distance**2) / (4.0 * sd * sd)))


@dataclass(frozen=True)
class LandscapePoint:
    x: float  # sigma (um) or distance (um)
    e_kinetic: float
    e_contact: float
    e_dress_mean: float
    e_dress_stderr: float

    @property
    def e_total(self) -> float:
        return self.e_kinetic + self.e_contact + self.e_dress_mean


def _trial_mean(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if len(values) > 1:
        stderr = float(np.std(values, ddof=1) / math.sqrt(len(values)))
    else:
        stderr = 0.0
    return mean, stderr


def soliton_energy_landscape(
    n_atoms: int,
    sigma_values,
    kernel: RadialKernel,
    g: float,
    hbar_over_m: float,
    trials: int = 100,
    seed: int = 0,
) -> list[LandscapePoint]:
    """Total energy of a single cloud versus its HWHM, dressing term averaged
    over sampled clouds (per-trial seeds derived from (seed, index), fixed
    summation order)."""
    points = []
    for j, sigma in enumerate(sigma_values):
        spec = CloudSpec(n_atoms, float(sigma))
        e_d = np.array([
            dressing_energy(sample_gaussian_cloud(spec, seed=(seed, j, t)), kernel)
            for t in range(trials)
        ])
        mean, err = _trial_mean(e_d)
        points.append(LandscapePoint(
            x=float(sigma),
            e_kinetic=kinetic_energy(n_atoms, sigma, hbar_over_m),
            e_contact=contact_energy(n_atoms, sigma, g),
            e_dress_mean=mean,
            e_dress_stderr=err,
        ))
    return points


def molecule_energy_landscape(
    n_atoms_total: int,
    sigma: float,
    d_values,
    kernel: RadialKernel,
    g: float,
    hbar_over_m: float,
    trials: int = 100,
    seed: int = 0,
) -> list[LandscapePoint]:
    """Total energy of two clouds of n/2 atoms at +-D/2 versus the distance D."""
    n_half = n_atoms_total // 2
    if n_half < 1:
        raise ValueError("molecule needs at least 2 atoms")
    points = []
    for j, d in enumerate(d_values):
        e_d = np.empty(trials)
        for t in range(trials):
            a = sample_gaussian_cloud(
                CloudSpec(n_half, sigma, (-0.5 * float(d), 0.0, 0.0)), seed=(seed, j, t, 0))
            b = sample_gaussian_cloud(
                CloudSpec(n_half, sigma, (+0.5 * float(d), 0.0, 0.0)), seed=(seed, j, t, 1))
            e_d[t] = dressing_energy(np.vstack([a, b]), kernel)
        mean, err = _trial_mean(e_d)
        points.append(LandscapePoint(
            x=float(d),
            e_kinetic=kinetic_energy(n_atoms_total, sigma, hbar_over_m),
            e_contact=molecule_contact_energy(n_atoms_total, sigma, g, float(d)),
            e_dress_mean=mean,
            e_dress_stderr=err,
        ))
    return points


@dataclass(frozen=True)
class PairStatistics:
    """Monte-Carlo expectations of the pair interaction for Gaussian clouds.

    The expected dressing energy of a cloud is exactly (pairs) * mu, with mu
    the expectation of U over the distance distribution of two cloud members;
    this replaces full-cloud sampling where only expectations matter (the
    atom-number scaling of the window solver), with cloud-level sampling kept
    for the landscapes themselves.
    """

    sigma: float
    mu_intra: float
    d_values: np.ndarray = field(repr=False)
    mu_cross: np.ndarray = field(repr=False)

    def cross_at(self, d: float) -> float:
        return float(np.interp(d, self.d_values, self.mu_cross))


def pair_statistics(kernel: RadialKernel, sigma: float, d_values,
                    samples: int = 200_000, seed: int = 0) -> PairStatistics:
    rng = np.random.default_rng((seed, 7))
    z = marsaglia_normals(3 * samples, rng).reshape(samples, 3)
    sd = sigma * HWHM_TO_SD
    delta = math.sqrt(2.0) * sd * z  # difference of two iid cloud positions
    mu_intra = float(np.mean(kernel(np.linalg.norm(delta, axis=1))))
    d_values = np.asarray(d_values, dtype=float)
    mu_cross = np.empty(len(d_values))
    for i, d in enumerate(d_values):
        shifted = delta.copy()
        shifted[:, 0] += d
        mu_cross[i] = float(np.mean(kernel(np.linalg.norm(shifted, axis=1))))
    return PairStatistics(sigma=sigma, mu_intra=mu_intra,
                          d_values=d_values, mu_cross=mu_cross)


@dataclass(frozen=True)
class StabilityReport:
    gamma: float  # loss rate per atom, 1/us
    n_min: int | None
    n_max: int | None  # None = unbounded (gamma == 0)
    n_max_exact: float | None
    omega_mol: float | None
    t2: float | None
    u_mol: float | None
    sigma_osc: float | None
    viable: bool
    note: str = ""


def _has_interior_minimum(e: np.ndarray) -> bool:
    i = int(np.argmin(e))
    return 0 < i < len(e) - 1 and e[i] < 0.0


def _single_energy(n: float, sigma: float, mu_intra: float, g: float,
                   hbar_over_m: float) -> float:
    return (kinetic_energy(n, sigma, hbar_over_m) + contact_energy(n, sigma, g)
            + 0.5 * n * (n - 1) * mu_intra)


def find_n_min(kernel: RadialKernel, sigma_values, g: float, hbar_over_m: float,
               n_hi: int = 1_000_000, samples: int = 200_000, seed: int = 0) -> int | None:
    """Smallest atom number whose energy-versus-size curve has a bound interior
    minimum, by bisection over N (self-trapping deepens monotonically with N)."""
    sigma_values = np.asarray(sigma_values, dtype=float)
    stats = [pair_statistics(kernel, s, [0.0], samples=samples, seed=seed) for s in sigma_values]
    mu = np.array([st.mu_intra for st in stats])

    def bound(n: int) -> bool:
        e = np.array([
            _single_energy(n, s, m, g, hbar_over_m) for s, m in zip(sigma_values, mu)
        ])
        return _has_interior_minimum(e)

    lo, hi = 2, n_hi
    if not bound(hi):
        return None
    if bound(lo):
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bound(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class MoleculeWell:
    d_min: float
    depth: float  # u_mol: well depth relative to the D->inf asymptote, > 0
    sigma_osc: float  # half width at half depth


def molecule_well(n_atoms_total: float, sigma: float, stats: PairStatistics,
                  g: float, hbar_over_m: float) -> MoleculeWell | None:
    """Locate the bound minimum of the molecule energy-versus-distance curve
    and measure its depth and half-width at half depth."""
    n_half = 0.5 * n_atoms_total
    d = stats.d_values
    e = np.array([
        kinetic_energy(n_atoms_total, sigma, hbar_over_m)
        + molecule_contact_energy(n_atoms_total, sigma, g, float(x))
        + n_half * (n_half - 1.0) * stats.mu_intra
        + n_half * n_half * stats.cross_at(float(x))
        for x in d
    ])
    e_inf = (kinetic_energy(n_atoms_total, sigma, hbar_over_m)
             + molecule_contact_energy(n_atoms_total, sigma, g, math.inf)
             + n_half * (n_half - 1.0) * stats.mu_intra)
    # the bound minimum must be separated from fusion by a barrier: look for
    # the deepest interior minimum that has a rise on its inner side
    i_min = None
    for i in range(1, len(d) - 1):
        if e[i] < e[i - 1] and e[i] <= e[i + 1] and e[i] < e_inf:
            if np.max(e[:i]) > e[i]:
                if i_min is None or e[i] < e[i_min]:
                    i_min = i
    if i_min is None:
        return None
    depth = float(e_inf - e[i_min])
    half_level = e[i_min] + 0.5 * depth
    # half-depth crossings on both sides of the minimum
    left = right = None
    for i in range(i_min, 0, -1):
        if e[i - 1] >= half_level:
            left = float(np.interp(half_level, [e[i], e[i - 1]], [d[i], d[i - 1]]))
            break
    for i in range(i_min, len(d) - 1):
        if e[i + 1] >= half_level:
            right = float(np.interp(half_level, [e[i], e[i + 1]], [d[i], d[i + 1]]))
            break
    if left is None or right is None:
        return None
    return MoleculeWell(d_min=float(d[i_min]), depth=depth, sigma_osc=0.5 * (right - left))


def oscillation_frequency(u_mol: float, n_atoms: float, sigma_osc: float,
                          hbar_over_m: float) -> float:
    """omega_mol = sqrt(hbar U_mol / (N m sigma_osc^2)) in rad/us."""
    return math.sqrt(hbar_over_m * u_mol / (n_atoms * sigma_osc**2))


def stability_window(
    entries,
    sigma: float,
    g: float,
    hbar_over_m: float,
    sigma_scan=None,
    d_values=None,
    samples: int = 200_000,
    seed: int = 0,
    max_fixed_point_iter: int = 50,
) -> list[StabilityReport]:
    """Stability window rows for a family of kernels indexed by the loss rate.

    entries: iterable of (gamma, RadialKernel). For each, N_min comes from the
    self-trapping bisection; the molecule well (depth u_mol, half-width
    sigma_osc) sets omega_mol(N) and the survival condition N Gamma t2 = 1 is
    solved by fixed-point iteration seeded at N_min (tolerance one atom).
    """
    reports = []
    for gamma, kernel in entries:
        if sigma_scan is None:
            scan = np.geomspace(0.2 * sigma, 20.0 * sigma, 28)
        else:
            scan = np.asarray(sigma_scan, dtype=float)
        if d_values is None:
            dv = np.linspace(0.0, kernel.r_max, 160)
        else:
            dv = np.asarray(d_values, dtype=float)
        n_min = find_n_min(kernel, scan, g, hbar_over_m, samples=samples, seed=seed)
        if n_min is None:
            reports.append(StabilityReport(gamma, None, None, None, None, None, None,
                                           None, False, "no self-trapping in range"))
            continue
        stats = pair_statistics(kernel, sigma, dv, samples=samples, seed=seed)

        def solve_at(n: float):
            well = molecule_well(n, sigma, stats, g, hbar_over_m)
            if well is None:
                return None
            om = oscillation_frequency(well.depth, n, well.sigma_osc, hbar_over_m)
            t2 = 2.0 * (2.0 * math.pi / om)
            return well, om, t2

        if gamma == 0:
            sol = solve_at(max(n_min, 2))
            if sol is None:
                reports.append(StabilityReport(gamma, n_min, None, None, None, None,
                                               None, None, False, "no bound molecule well"))
                continue
            well, om, t2 = sol
            reports.append(StabilityReport(gamma, n_min, None, None, om, t2, well.depth,
                                           well.sigma_osc, True, "unbounded (gamma = 0)"))
            continue

        n = float(max(n_min, 2))
        converged = False
        well = om = t2 = None
        for _ in range(max_fixed_point_iter):
            sol = solve_at(n)
            if sol is None:
                break
            well, om, t2 = sol
            n_next = 1.0 / (gamma * t2)
            if abs(n_next - n) <= 1.0:
                n = n_next
                converged = True
                break
            n = n_next
        if not converged or well is None or n < 1:
            reports.append(StabilityReport(gamma, n_min, None, None, None, None, None,
                                           None, False, "no self-consistent n_max"))
            continue
        sol = solve_at(n)
        well, om, t2 = sol
        n_max = int(math.floor(n))
        viable = n_min <= n_max
        reports.append(StabilityReport(
            gamma=gamma, n_min=n_min, n_max=n_max, n_max_exact=n,
            omega_mol=om, t2=t2, u_mol=well.depth, sigma_osc=well.sigma_osc,
            viable=viable, note="" if viable else "window empty (n_min > n_max)",
        ))
    return reports
