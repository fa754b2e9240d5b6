"""TOML run configurations.

One file per run, flat namespaced sections mirroring the module types;
frequencies are quoted the spectroscopic way (nu/2pi), with the unit spelled
out in the key name except in [dressing], whose keys mirror the parameter
fields directly and are all MHz (c6 in MHz um^6). docs/config_schema.md lists
every key, unit and default.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .params import AtomSpecies, DressingParams, LockMode
from .units import rad_per_us
from .kernels import RadialKernel
from .gpe import ExternalPotential, Grid


class ConfigError(ValueError):
    """Malformed or missing configuration value; the message names the key."""


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


class Section:
    """Typed accessor over one config table with key-qualified errors."""

    def __init__(self, data: dict, name: str):
        self.data = data or {}
        self.name = name
        if not isinstance(self.data, dict):
            raise ConfigError(f"[{name}] must be a table")

    def _get(self, key, default, required):
        if key not in self.data:
            if required:
                raise ConfigError(f"{self.name}.{key}: required key missing")
            return default
        return self.data[key]

    def number(self, key, default=None, required=False) -> float | None:
        v = self._get(key, default, required)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{self.name}.{key}: expected a number, got {v!r}")
        return float(v)

    def integer(self, key, default=None, required=False) -> int | None:
        v = self._get(key, default, required)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{self.name}.{key}: expected an integer, got {v!r}")
        return v

    def text(self, key, default=None, required=False, choices=None) -> str | None:
        v = self._get(key, default, required)
        if v is None:
            return None
        if not isinstance(v, str):
            raise ConfigError(f"{self.name}.{key}: expected a string, got {v!r}")
        if choices and v not in choices:
            raise ConfigError(f"{self.name}.{key}: {v!r} not one of {sorted(choices)}")
        return v

    def flag(self, key, default=False) -> bool:
        v = self._get(key, default, False)
        if not isinstance(v, bool):
            raise ConfigError(f"{self.name}.{key}: expected true/false, got {v!r}")
        return v

    def numbers(self, key, default=None, required=False) -> list[float] | None:
        v = self._get(key, default, required)
        if v is None:
            return None
        if not isinstance(v, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            raise ConfigError(f"{self.name}.{key}: expected a list of numbers, got {v!r}")
        return [float(x) for x in v]

    def integers(self, key, default=None, required=False) -> list[int] | None:
        v = self._get(key, default, required)
        if v is None:
            return None
        if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            raise ConfigError(f"{self.name}.{key}: expected a list of integers, got {v!r}")
        return list(v)

    def unknown_keys(self, known) -> list[str]:
        return [k for k in self.data if k not in known]


def check_known(section: Section, known: set) -> None:
    extra = section.unknown_keys(known)
    if extra:
        raise ConfigError(f"{section.name}.{extra[0]}: unknown key")


def parse_dressing(cfg: dict) -> DressingParams:
    sec = Section(cfg.get("dressing"), "dressing")
    check_known(sec, {"omega1", "omega2", "delta", "gamma1", "gamma2", "lock",
                      "gamma_p", "gamma_r", "c6", "n"})
    lock_raw = sec.data.get("lock", "unlocked")
    if isinstance(lock_raw, str):
        if lock_raw not in ("unlocked", "out_of_phase"):
            raise ConfigError(f"dressing.lock: {lock_raw!r} not 'unlocked', 'out_of_phase' or a number (MHz)")
        lock = LockMode(lock_raw)
    elif isinstance(lock_raw, (int, float)) and not isinstance(lock_raw, bool):
        lock = LockMode.custom(rad_per_us(float(lock_raw)))
    else:
        raise ConfigError(f"dressing.lock: bad value {lock_raw!r}")
    try:
        return DressingParams.from_mhz(
            omega1=sec.number("omega1", required=True),
            omega2=sec.number("omega2", required=True),
            delta=sec.number("delta", required=True),
            gamma1=sec.number("gamma1", 0.0),
            gamma2=sec.number("gamma2", 0.0),
            lock="unlocked",  # placeholder, replaced below (custom is already rad/us)
            gamma_p=sec.number("gamma_p", 7.6e-3),
            gamma_r=sec.number("gamma_r", 5e-4),
            c6=sec.number("c6"),
            n=sec.integer("n", 100),
        ).with_(lock=lock)
    except ValueError as exc:
        raise ConfigError(f"dressing: {exc}") from exc


def parse_calibration(cfg: dict) -> dict | None:
    if "calibration" not in cfg:
        return None
    sec = Section(cfg.get("calibration"), "calibration")
    check_known(sec, {"gamma_target_hz", "omega1_min_mhz", "omega1_max_mhz", "points"})
    target_hz = sec.number("gamma_target_hz", required=True)
    if target_hz <= 0:
        raise ConfigError("calibration.gamma_target_hz: must be positive")
    return {
        "gamma_target": rad_per_us(target_hz * 1e-6),
        "omega1_range": (rad_per_us(sec.number("omega1_min_mhz", 0.1)),
                         rad_per_us(sec.number("omega1_max_mhz", 2.0))),
        "calibration_points": sec.integer("points", 48),
    }


def parse_grid(cfg: dict) -> Grid:
    sec = Section(cfg.get("grid"), "grid")
    check_known(sec, {"extent_um", "points"})
    extent = sec.numbers("extent_um", required=True)
    points = sec.integers("points", required=True)
    try:
        return Grid(extent=tuple(extent), points=tuple(points))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def parse_trap(cfg: dict) -> ExternalPotential:
    if "trap" not in cfg:
        return ExternalPotential.none()
    sec = Section(cfg.get("trap"), "trap")
    check_known(sec, {"type", "omega_hz", "radius_um", "height_khz", "wall_width_um"})
    kind = sec.text("type", "none", choices={"none", "harmonic", "disc"})
    if kind == "none":
        return ExternalPotential.none()
    if kind == "harmonic":
        omegas = sec.numbers("omega_hz", required=True)
        return ExternalPotential.harmonic(*[rad_per_us(o * 1e-6) for o in omegas])
    return ExternalPotential.disc(
        radius=sec.number("radius_um", required=True),
        height=rad_per_us(sec.number("height_khz", required=True) * 1e-3),
        wall_width=sec.number("wall_width_um", 1.0),
    )


_SYNTH_KEYS = {
    "soft_core": {"u0_khz", "r_core_um", "r_max_um", "points"},
    "soft_core_gauss": {"u0_khz", "r_core_um", "peak_khz", "r_peak_um", "width_um",
                        "r_max_um", "points"},
    "gaussian": {"u0_khz", "width_um", "r_max_um", "points"},
}


def parse_synthetic_kernel(sec: Section) -> RadialKernel:
    form = sec.text("form", required=True, choices=set(_SYNTH_KEYS))
    check_known(sec, _SYNTH_KEYS[form] | {"form", "source"})
    khz_to_rad = lambda v: rad_per_us(v * 1e-3)
    common = {}
    if sec.number("r_max_um") is not None:
        common["r_max"] = sec.number("r_max_um")
    if sec.integer("points") is not None:
        common["points"] = sec.integer("points")
    if form == "soft_core":
        return RadialKernel.soft_core(khz_to_rad(sec.number("u0_khz", required=True)),
                                      sec.number("r_core_um", required=True), **common)
    if form == "soft_core_gauss":
        return RadialKernel.soft_core_gauss(
            khz_to_rad(sec.number("u0_khz", required=True)),
            sec.number("r_core_um", required=True),
            khz_to_rad(sec.number("peak_khz", required=True)),
            sec.number("r_peak_um", required=True),
            sec.number("width_um", required=True), **common)
    return RadialKernel.gaussian(khz_to_rad(sec.number("u0_khz", required=True)),
                                 sec.number("width_um", required=True), **common)


def parse_contact(cfg: dict, dims: int) -> float:
    """Contact coupling g in rad um^dims / us from the [gpe] section."""
    sec = Section(cfg.get("gpe"), "gpe")
    mode = sec.text("contact", "off", choices={"off", "sr88", "explicit"})
    if mode == "off":
        return 0.0
    if mode == "explicit":
        g = sec.number("g_value", required=True)
        return g
    species = AtomSpecies.sr88()
    if dims == 1:
        raise ConfigError("gpe.contact: 'sr88' needs dims >= 2 (supply g_value for 1D runs)")
    if dims == 2:
        return species.g_2d(sec.number("l_z_um", 1.0))
    return species.g_3d


def parse_hbar_over_m(cfg: dict) -> float:
    sec = Section(cfg.get("gpe"), "gpe")
    v = sec.number("hbar_over_m_um2_per_us")
    return AtomSpecies.sr88().hbar_over_m if v is None else v
