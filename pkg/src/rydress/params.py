"""Laser/atom parameter sets for two-photon noisy dressing.

Level scheme: ground |g>, short-lived intermediate |p>, Rydberg |e>.
Laser 1 (Rabi frequency omega1) couples g-p, laser 2 (omega2) couples p-e,
both combined in two-photon resonance with intermediate detuning delta.
All rates are angular (rad/us); constructors taking MHz accept nu/2pi values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .units import HBAR_OVER_M_SR88, SCATTERING_LENGTH_SR88, GAMMA_P_SR_MHZ, TWO_PI, rad_per_us

# van-der-Waals coefficients (angular, rad um^6/us) at the two principal
# quantum numbers with published values; intermediate n uses power-law
# interpolation in log space between these anchors.
_C6_ANCHORS = {24: rad_per_us(0.12), 100: rad_per_us(73e6)}  # 120 kHz um^6, 73 THz um^6


def c6_from_n(n: int) -> float:
    """Interpolated van-der-Waals coefficient for triplet-S Rydberg states.

    Anchored at n=24 (120 kHz um^6) and n=100 (73 THz um^6); in between, a
    pure power law in n connecting the anchors (exponent ~14.2). This is an
    interpolation convenience, not an electronic-structure result; override
    the coefficient numerically when an accurate value is available.
    """
    if n < 24 or n > 100:
        raise ValueError(f"c6 interpolation table covers 24 <= n <= 100, got n={n}")
    lo, hi = _C6_ANCHORS[24], _C6_ANCHORS[100]
    exponent = math.log(hi / lo) / math.log(100 / 24)
    return lo * (n / 24) ** exponent


@dataclass(frozen=True)
class LockMode:
    """Correlation mode of the two lasers' phase noise.

    kind is one of "out_of_phase" (gamma_lock = |gamma1-gamma2|), "unlocked"
    (gamma_lock = gamma1+gamma2) or "custom" with an explicit value that must
    lie inside [|gamma1-gamma2|, gamma1+gamma2].
    """

    kind: str = "unlocked"
    value: float | None = None

    _KINDS = ("out_of_phase", "unlocked", "custom")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown lock mode {self.kind!r}, expected one of {self._KINDS}")
        if self.kind == "custom" and self.value is None:
            raise ValueError("custom lock mode needs an explicit gamma_lock value")

    @classmethod
    def out_of_phase(cls) -> "LockMode":
        return cls("out_of_phase")

    @classmethod
    def unlocked(cls) -> "LockMode":
        return cls("unlocked")

    @classmethod
    def custom(cls, value: float) -> "LockMode":
        return cls("custom", value)

    def gamma_lock(self, gamma1: float, gamma2: float) -> float:
        lo, hi = abs(gamma1 - gamma2), gamma1 + gamma2
        if self.kind == "out_of_phase":
            return lo
        if self.kind == "unlocked":
            return hi
        if not (lo - 1e-12 * max(hi, 1.0) <= self.value <= hi + 1e-12 * max(hi, 1.0)):
            raise ValueError(
                f"custom gamma_lock={self.value} outside admissible interval [{lo}, {hi}]"
            )
        return self.value


@dataclass(frozen=True)
class DressingParams:
    """Full parameter set of the noisy dressing scheme (all rates rad/us).

    gamma1/gamma2 are the laser linewidths of the lower and upper leg,
    gamma_p/gamma_r the intermediate and Rydberg decay rates, c6 the
    van-der-Waals coefficient (rad um^6/us, signed), n the principal quantum
    number kept as metadata. The Rydberg lifetime entering gamma_r is an
    input, not a computed quantity; every gamma_r-sensitive feature (the
    inner interaction peak in particular) moves when it is changed.
    """

    omega1: float
    omega2: float
    delta: float
    gamma1: float = 0.0
    gamma2: float = 0.0
    lock: LockMode = field(default_factory=LockMode.unlocked)
    gamma_p: float = rad_per_us(GAMMA_P_SR_MHZ)
    gamma_r: float = rad_per_us(5e-4)
    c6: float = _C6_ANCHORS[100]
    n: int = 100

    def __post_init__(self):
        # omega1 = 0 is allowed so the decoupled-sector diagnostics of the
        # steady-state solver stay constructible; omega2 must drive the
        # upper leg for the dressing scheme to make sense.
        if self.omega1 < 0 or self.omega2 <= 0:
            raise ValueError("need omega1 >= 0 and omega2 > 0")
        for name in ("gamma1", "gamma2", "gamma_p", "gamma_r"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.delta == 0:
            raise ValueError("intermediate detuning delta must be nonzero")
        # validates the custom-lock interval as a side effect
        self.lock.gamma_lock(self.gamma1, self.gamma2)

    @classmethod
    def from_mhz(
        cls,
        omega1: float,
        omega2: float,
        delta: float,
        gamma1: float = 0.0,
        gamma2: float = 0.0,
        lock: LockMode | str = "unlocked",
        gamma_p: float = GAMMA_P_SR_MHZ,
        gamma_r: float = 5e-4,
        c6: float | None = None,
        n: int = 100,
    ) -> "DressingParams":
        """Build from nu/2pi values in MHz (c6 in MHz um^6, defaults to the
        interpolation table at the given n)."""
        if isinstance(lock, str):
            lock = LockMode(lock)
        c6_rad = c6_from_n(n) if c6 is None else rad_per_us(c6)
        return cls(
            omega1=rad_per_us(omega1),
            omega2=rad_per_us(omega2),
            delta=rad_per_us(delta),
            gamma1=rad_per_us(gamma1),
            gamma2=rad_per_us(gamma2),
            lock=lock,
            gamma_p=rad_per_us(gamma_p),
            gamma_r=rad_per_us(gamma_r),
            c6=c6_rad,
            n=n,
        )

    def with_(self, **kwargs) -> "DressingParams":
        return replace(self, **kwargs)

    @property
    def gamma_lock(self) -> float:
        return self.lock.gamma_lock(self.gamma1, self.gamma2)

    @property
    def rydberg_fraction(self) -> float:
        """Weak-dressing Rydberg population of the dark state, (omega1/omega2)^2."""
        return (self.omega1 / self.omega2) ** 2

    @property
    def eit_bandwidth(self) -> float:
        """Transparency window omega2^2 / (4 |delta|)."""
        return self.omega2**2 / (4.0 * abs(self.delta))

    @property
    def max_rate(self) -> float:
        return max(
            self.omega1, self.omega2, abs(self.delta),
            self.gamma1, self.gamma2, self.gamma_p, self.gamma_r,
        )


def derive_lock_rates(params: DressingParams) -> tuple[float, float, float]:
    """Dephasing rates (Gamma_gg, Gamma_pp, Gamma_ee) of the three projector
    jump operators that model correlated laser phase noise.

    Gamma_gg = (gamma_lock + gamma1 - gamma2)/2,
    Gamma_pp = (-gamma_lock + gamma1 + gamma2)/2,
    Gamma_ee = (gamma_lock - gamma1 + gamma2)/2.
    All three are non-negative exactly when gamma_lock lies in the admissible
    interval, which LockMode enforces.
    """
    gl = params.gamma_lock
    g1, g2 = params.gamma1, params.gamma2
    rates = ((gl + g1 - g2) / 2.0, (-gl + g1 + g2) / 2.0, (gl - g1 + g2) / 2.0)
    eps = 1e-12 * max(g1 + g2, 1.0)
    if min(rates) < -eps:
        raise ValueError(f"unphysical locking: derived dephasing rates {rates}")
    return tuple(max(r, 0.0) for r in rates)


@dataclass(frozen=True)
class AtomSpecies:
    """Condensate species: hbar/m in um^2/us and s-wave scattering length in um."""

    hbar_over_m: float
    scattering_length: float
    label: str = ""

    def __post_init__(self):
        if self.hbar_over_m <= 0:
            raise ValueError("hbar_over_m must be positive")

    @classmethod
    def sr88(cls) -> "AtomSpecies":
        return cls(HBAR_OVER_M_SR88, SCATTERING_LENGTH_SR88, "Sr-88")

    @property
    def g_3d(self) -> float:
        """Contact coupling g = 4 pi hbar^2 a / m, divided by hbar: rad um^3/us."""
        return 4.0 * math.pi * self.hbar_over_m * self.scattering_length

    def g_2d(self, l_z: float) -> float:
        """Effective 2D coupling g / (sqrt(2 pi) l_z) for a Gaussian transverse
        profile of width l_z (um). Offered as a helper; 2D runs may supply any
        effective coupling directly."""
        return self.g_3d / (math.sqrt(TWO_PI) * l_z)
