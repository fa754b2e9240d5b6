"""Interaction profiles U(r), Gamma(r): sampling, feature extraction,
closed-form radius estimates and loss-rate calibration.

A profile's canonical features: the soft core (plateau strength u_c with
half-value radius r_c), a van-der-Waals inner peak (u_ip at r_ip, sign set by
the sign of c6), a collective-shift outer peak (u_op at r_op, sign set by the
sign of -delta), an attractive outer well (u_well at r_well), and the split
soft-core radii r_ic / r_oc when the inner peak cuts the plateau in two.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.signal import find_peaks

from .params import DressingParams
from .steady import PairInteraction

PEAK_PROMINENCE_FRACTION = 0.01  # relative to max |U| over the profile
LOSS_ENHANCEMENT_FACTOR = 1.5  # loss growth marking a collective outer peak


class CalibrationRangeError(RuntimeError):
    """Loss target not bracketed by the allowed omega1 range."""

    def __init__(self, msg, bracket=None):
        super().__init__(msg)
        self.bracket = bracket


def softcore_radius_analytic(params: DressingParams) -> float:
    """Soft-core radius from the bandwidth-crossing condition
    P_e^2 V^2(R) = (omega1 omega2 / 2 delta)^2 + gamma1^2 + gamma2^2.

    Written for c6 > 0; for attractive c6 the same formula is applied to |c6|
    (the condition is quadratic in V, so only the magnitude enters).
    """
    rhs = (params.omega1 * params.omega2 / (2.0 * params.delta)) ** 2 \
        + params.gamma1**2 + params.gamma2**2
    if rhs <= 0:
        raise ValueError("soft-core condition has zero right-hand side (omega1 = 0, quiet lasers)")
    pe = params.rydberg_fraction
    return (abs(params.c6) * pe / math.sqrt(rhs)) ** (1.0 / 6.0)


def inner_peak_radius_analytic(params: DressingParams) -> float:
    """Inner-peak radius from
    V^2(R) = delta^2 + (gamma2+gamma_p+gamma_r) omega2^2 / (4 gamma_r)
             + (gamma2+gamma_p+gamma_r)^2 / 4.
    The peak is pushed to r = 0 as gamma_r -> 0. Whether the feature is
    actually present is decided numerically."""
    if params.gamma_r == 0:
        return 0.0
    width = params.gamma2 + params.gamma_p + params.gamma_r
    rhs = params.delta**2 + width * params.omega2**2 / (4.0 * params.gamma_r) + width**2 / 4.0
    return (abs(params.c6) / math.sqrt(rhs)) ** (1.0 / 6.0)


def outer_peak_radius_analytic(params: DressingParams) -> float | None:
    """Outer-peak radius from V(R) = 2 delta omega2^2 / (omega2^2 + gamma_p^2 - 4 delta^2).

    Exists only for (omega2 > 2|delta|, delta > 0) or (omega2 < 2|delta|,
    delta < 0); outside these regimes, or when the required V has the wrong
    sign for the given c6, the feature is absent and None is returned."""
    o2, d = params.omega2, params.delta
    in_regime = (o2 > 2.0 * abs(d) and d > 0) or (o2 < 2.0 * abs(d) and d < 0)
    if not in_regime:
        return None
    v = 2.0 * d * o2**2 / (o2**2 + params.gamma_p**2 - 4.0 * d**2)
    if v == 0 or (v > 0) != (params.c6 > 0):
        return None
    return (params.c6 / v) ** (1.0 / 6.0)


def outer_core_radius_analytic(params: DressingParams) -> float:
    """Outer soft-core radius of split profiles, V(R) = 2 * eit_bandwidth."""
    return (abs(params.c6) / (2.0 * params.eit_bandwidth)) ** (1.0 / 6.0)


def analytic_radii(params: DressingParams) -> dict[str, float]:
    out = {
        "r_c": softcore_radius_analytic(params),
        "r_ip": inner_peak_radius_analytic(params),
        "r_oc": outer_core_radius_analytic(params),
    }
    r_op = outer_peak_radius_analytic(params)
    if r_op is not None:
        out["r_op"] = r_op
    return out


def default_r_grid(params: DressingParams, points: int = 240) -> np.ndarray:
    """Geometric separation grid spanning 0.2x the smallest to 3.2x the
    largest closed-form radius (at least 200 points for feature extraction)."""
    radii = [r for r in analytic_radii(params).values() if r > 0]
    lo, hi = 0.2 * min(radii), 3.2 * max(radii)
    return np.geomspace(lo, hi, points)


@dataclass(frozen=True)
class FeatureSet:
    """Extracted interaction-profile features; absent features are None.

    Strengths in rad/us, radii in um. delta_eit = omega2^2/(4|delta|) and
    p_e = (omega1/omega2)^2 are carried along for convenience.
    """

    u_c: float
    r_c: float | None = None
    u_ip: float | None = None
    r_ip: float | None = None
    u_op: float | None = None
    r_op: float | None = None
    u_well: float | None = None
    r_well: float | None = None
    r_ic: float | None = None
    r_oc: float | None = None
    delta_eit: float | None = None
    p_e: float | None = None

    @property
    def present(self) -> dict[str, bool]:
        return {
            "soft_core": self.r_c is not None,
            "inner_peak": self.u_ip is not None,
            "outer_peak": self.u_op is not None,
            "well": self.u_well is not None,
            "split_core": self.r_oc is not None,
        }

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "u_c", "r_c", "u_ip", "r_ip", "u_op", "r_op",
            "u_well", "r_well", "r_ic", "r_oc", "delta_eit", "p_e")}


@dataclass(frozen=True)
class InteractionProfile:
    """Sampled effective interaction U(r) and loss rate Gamma(r), both rad/us."""

    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    params: DressingParams | None = None
    u_infinity: float = 0.0
    loss_infinity: float = 0.0
    failures: tuple = ()

    def __post_init__(self):
        r = np.asarray(self.r, float)
        if r.ndim != 1 or len(r) == 0:
            raise ValueError("r grid must be a non-empty 1D array")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("r grid must be strictly increasing and positive")

    def interpolators(self):
        """Monotone cubic interpolants of U(r) and Gamma(r) (no overshoot at
        the barrier, smooth tails for kernel tabulation)."""
        good = np.isfinite(self.u) & np.isfinite(self.gamma)
        return (PchipInterpolator(self.r[good], self.u[good], extrapolate=False),
                PchipInterpolator(self.r[good], self.gamma[good], extrapolate=False))

    @property
    def gamma_max(self) -> float:
        return float(np.nanmax(self.gamma))

    def features(self) -> FeatureSet:
        return extract_features(self)


def interaction_profile(params: DressingParams, r_grid, threads: int = 1) -> InteractionProfile:
    """Evaluate the pair steady state over a separation grid.

    Grid points are independent; failures at individual points are recorded
    in InteractionProfile.failures (values NaN) rather than aborting.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    pi = PairInteraction(params)

    def eval_chunk(chunk):
        try:
            return pi.interaction_and_loss(chunk), []
        except np.linalg.LinAlgError:
            u = np.full(len(chunk), np.nan)
            g = np.full(len(chunk), np.nan)
            fails = []
            for i, ri in enumerate(chunk):
                try:
                    ui, gi = pi.interaction_and_loss(np.array([ri]))
                    u[i], g[i] = ui[0], gi[0]
                except Exception as exc:  # noqa: BLE001 - recorded per point
                    fails.append((float(ri), repr(exc)))
            return (u, g), fails

    if threads > 1 and len(r_grid) > 8:
        chunks = np.array_split(r_grid, min(threads * 4, len(r_grid)))
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(eval_chunk, chunks))
        u = np.concatenate([res[0][0] for res in results])
        g = np.concatenate([res[0][1] for res in results])
        failures = tuple(f for res in results for f in res[1])
    else:
        (u, g), fails = eval_chunk(r_grid)
        failures = tuple(fails)
    return InteractionProfile(
        r=r_grid, u=u, gamma=g, params=params,
        u_infinity=pi.u_infinity, loss_infinity=pi.loss_infinity, failures=failures,
    )


def _refine_extremum(r, u, idx):
    """Sub-grid extremum location/value from a quadratic through 3 points."""
    if idx == 0 or idx == len(r) - 1:
        return float(r[idx]), float(u[idx])
    x = r[idx - 1: idx + 2]
    y = u[idx - 1: idx + 2]
    coeff = np.polyfit(x - x[1], y, 2)
    if coeff[0] == 0:
        return float(r[idx]), float(u[idx])
    dx = -coeff[1] / (2.0 * coeff[0])
    dx = float(np.clip(dx, x[0] - x[1], x[2] - x[1]))
    return float(x[1] + dx), float(np.polyval(coeff, dx))


def _signed_half_crossing(r, u, level):
    """First radius where u crosses level (monotone cubic root)."""
    diff = u - level
    sign = np.sign(diff)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(flips) == 0:
        return None
    i = flips[0]
    spline = PchipInterpolator(r[i: i + 2], diff[i: i + 2])
    roots = spline.roots()
    return float(roots[0]) if len(roots) else float(r[i])


def extract_features(profile: InteractionProfile) -> FeatureSet:
    """Classify the profile's extrema into soft core, inner/outer peak and well.

    u_c is U at the smallest sampled r; extrema need a prominence of 1% of
    max |U|; radii are refined sub-grid with a local quadratic. With dressing
    parameters attached, the inner peak is the extremum matching sign(c6)
    nearest the closed-form inner-peak radius and the outer peak the
    sign(-delta) extremum nearest the closed-form outer-peak radius (falling
    back to loss enhancement when that regime is absent). Without parameters,
    peaks are assigned positionally.
    """
    r, u, gam = np.asarray(profile.r), np.asarray(profile.u), np.asarray(profile.gamma)
    if np.any(~np.isfinite(u)) or np.any(~np.isfinite(gam)):
        raise ValueError("profile contains NaN/inf values; refusing feature extraction")
    params = profile.params
    scale = np.abs(u).max()
    if scale == 0:
        return FeatureSet(u_c=0.0)
    prom = PEAK_PROMINENCE_FRACTION * scale

    u_c = float(u[0])
    maxima = [_refine_extremum(r, u, i) for i in find_peaks(u, prominence=prom)[0]]
    minima = [_refine_extremum(r, u, i) for i in find_peaks(-u, prominence=prom)[0]]
    extrema = sorted(maxima + minima)

    r_c = _signed_half_crossing(r, u, 0.5 * u_c)

    sign_c6 = 1.0 if params is None else math.copysign(1.0, params.c6)
    ip_cands = [e for e in extrema if math.copysign(1.0, e[1]) == sign_c6]
    op_sign = None if params is None else -math.copysign(1.0, params.delta)

    r_ip = u_ip = None
    if params is not None and ip_cands:
        target = inner_peak_radius_analytic(params)
        if target > 0:
            cand = min(ip_cands, key=lambda e: abs(math.log(e[0] / target)))
            if 0.4 * target < cand[0] < 2.5 * target:
                r_ip, u_ip = cand
    elif ip_cands:
        r_ip, u_ip = ip_cands[0]

    r_op = u_op = None
    beyond = r_ip if r_ip is not None else (r_c or 0.0)
    if params is not None:
        op_cands = [e for e in extrema
                    if math.copysign(1.0, e[1]) == op_sign and e[0] > beyond]
        target = outer_peak_radius_analytic(params)
        if target is not None and op_cands:
            cand = min(op_cands, key=lambda e: abs(math.log(e[0] / target)))
            if 0.4 * target < cand[0] < 2.5 * target:
                r_op, u_op = cand
        elif op_cands:
            # fall back on the loss signature: the collective outer peak sits
            # on a locally enhanced loss rate, the van-der-Waals peak does not
            gam_i = PchipInterpolator(r, gam)
            baseline = max(profile.loss_infinity, 1e-300)
            enhanced = [e for e in op_cands if gam_i(e[0]) > LOSS_ENHANCEMENT_FACTOR * baseline]
            if enhanced:
                r_op, u_op = max(enhanced, key=lambda e: abs(e[1]))
    else:
        later = [e for e in maxima if e[0] > beyond and (r_ip is None or e[0] > r_ip * 1.01)]
        if later and r_ip is not None:
            r_op, u_op = later[-1]

    well_cands = [e for e in minima if e[1] < 0 and e[0] > beyond]
    r_well = u_well = None
    if well_cands:
        r_well, u_well = min(well_cands, key=lambda e: e[1])

    # split soft core: an inner peak carving the plateau in two re-labels the
    # half-value radius as the inner-core radius; the outer-core radius is the
    # half-value decay of the shelf that resumes beyond the peak
    r_ic = r_oc = None
    if r_ip is not None and r_c is not None and r_ip > r_c:
        r_ic = r_c
        after = r > r_ip
        shelf_min = [e for e in minima if e[0] > r_ip
                     and math.copysign(1.0, e[1]) == math.copysign(1.0, u_c)]
        if shelf_min and np.any(after):
            shelf_r, shelf_u = shelf_min[0]
            mask = r >= shelf_r
            r_oc = _signed_half_crossing(r[mask], u[mask], 0.5 * shelf_u)

    delta_eit = params.eit_bandwidth if params is not None else None
    p_e = params.rydberg_fraction if params is not None else None
    return FeatureSet(
        u_c=u_c, r_c=r_c, u_ip=u_ip, r_ip=r_ip, u_op=u_op, r_op=r_op,
        u_well=u_well, r_well=r_well, r_ic=r_ic, r_oc=r_oc,
        delta_eit=delta_eit, p_e=p_e,
    )


DEFAULT_OMEGA1_RANGE_MHZ = (0.1, 2.0)


def calibrate_omega1(
    params: DressingParams,
    gamma_target: float,
    omega1_range: tuple[float, float] | None = None,
    r_grid: np.ndarray | None = None,
    rel_tol: float = 0.01,
    max_iter: int = 60,
    calibration_points: int = 48,
) -> float:
    """Find omega1 so the maximum loss rate over the profile equals
    gamma_target (rad/us) to rel_tol, by bisection in log omega1.

    The loss maximum grows monotonically with omega1 in the weak-dressing
    regime; a coarse scan asserts this before bisection. Raises
    CalibrationRangeError when the target is not bracketed by the range
    (default 0.1..2 MHz).
    """
    from .units import rad_per_us

    if omega1_range is None:
        omega1_range = (rad_per_us(DEFAULT_OMEGA1_RANGE_MHZ[0]),
                        rad_per_us(DEFAULT_OMEGA1_RANGE_MHZ[1]))
    lo, hi = omega1_range
    if gamma_target <= 0:
        raise CalibrationRangeError("loss target must be positive (omega1 = 0 is out of range)")

    if r_grid is None:
        radii = []
        for om in (lo, hi):
            radii.extend(analytic_radii(params.with_(omega1=om)).values())
        radii = [x for x in radii if x > 0]
        r_grid = np.geomspace(0.2 * min(radii), 3.2 * max(radii), calibration_points)

    def gamma_max(om: float) -> float:
        pi = PairInteraction(params.with_(omega1=om))
        _, g = pi.interaction_and_loss(r_grid)
        return float(np.max(g))

    scan = [gamma_max(om) for om in np.geomspace(lo, hi, 4)]
    if any(b < a * (1 - 1e-6) for a, b in zip(scan, scan[1:])):
        raise CalibrationRangeError(
            f"max loss is not monotone in omega1 over the range: {scan}", bracket=(scan[0], scan[-1])
        )
    g_lo, g_hi = scan[0], scan[-1]
    if not (g_lo <= gamma_target <= g_hi):
        raise CalibrationRangeError(
            f"loss target {gamma_target:.4g} rad/us outside reachable "
            f"[{g_lo:.4g}, {g_hi:.4g}] for omega1 in given range",
            bracket=(g_lo, g_hi),
        )

    log_lo, log_hi = math.log(lo), math.log(hi)
    mid = 0.5 * (log_lo + log_hi)
    for _ in range(max_iter):
        mid = 0.5 * (log_lo + log_hi)
        g_mid = gamma_max(math.exp(mid))
        if abs(g_mid - gamma_target) <= 0.5 * rel_tol * gamma_target:
            break
        if g_mid < gamma_target:
            log_lo = mid
        else:
            log_hi = mid
    return math.exp(mid)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    omega1: float | None
    gamma_max: float | None
    features: FeatureSet | None
    error: str | None = None


@dataclass(frozen=True)
class SweepTable:
    axis: str
    rows: tuple


def sweep(
    params_template: DressingParams,
    axis: str,
    values,
    gamma_target: float | None = None,
    r_grid_points: int = 240,
    calibration_points: int = 48,
    omega1_range: tuple[float, float] | None = None,
    threads: int = 1,
) -> SweepTable:
    """One-parameter scan: for each value of the named DressingParams field,
    optionally recalibrate omega1 to the loss target, then sample the profile
    and extract features. The axis "gamma12" drives both laser linewidths
    together (equal-noise scans). Rows are independent; per-row failures are
    recorded in SweepRow.error. Results are assembled in input order
    regardless of the thread count."""
    if axis != "gamma12" and not hasattr(params_template, axis):
        raise ValueError(f"unknown sweep axis {axis!r}")

    def apply_axis(value) -> DressingParams:
        if axis == "gamma12":
            return params_template.with_(gamma1=value, gamma2=value)
        return params_template.with_(**{axis: value})

    def run_one(value) -> SweepRow:
        p = apply_axis(value)
        try:
            if gamma_target is not None:
                om1 = calibrate_omega1(p, gamma_target, omega1_range=omega1_range,
                                       calibration_points=calibration_points)
                p = p.with_(omega1=om1)
            prof = interaction_profile(p, default_r_grid(p, r_grid_points))
            return SweepRow(float(value), p.omega1, prof.gamma_max, extract_features(prof))
        except Exception as exc:  # noqa: BLE001 - per-row failures recorded
            return SweepRow(float(value), None, None, None, error=repr(exc))

    values = list(values)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = tuple(ex.map(run_one, values))
    else:
        rows = tuple(run_one(v) for v in values)
    return SweepTable(axis=axis, rows=rows)
