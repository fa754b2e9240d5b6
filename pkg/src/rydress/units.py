"""Unit conventions and physical constants.

Internal convention: hbar = 1, lengths in micrometers, times in microseconds.
Every rate and frequency is stored as an angular quantity (rad/us). Inputs
quoted the spectroscopic way, as nu/2pi in MHz, are converted on the way in
with :func:`rad_per_us`. One ordinary MHz therefore equals 2*pi rad/us, and
the round trip MHz -> rad/us -> MHz is exact in floating point (a single
multiply and divide by the same constant).
"""

import math

TWO_PI = 2.0 * math.pi

# CODATA 2018: hbar in J*s, atomic mass constant in kg.
_HBAR_SI = 1.054571817e-34
_AMU_SI = 1.66053906660e-27
# AME2020 atomic mass of Sr-88 in u.
_SR88_MASS_U = 87.9056125

#: hbar/m for Sr-88 in um^2/us (1 m^2/s = 1e6 um^2/us).
HBAR_OVER_M_SR88 = _HBAR_SI / (_SR88_MASS_U * _AMU_SI) * 1e6

#: s-wave scattering length of Sr-88, 96 Bohr radii, in um.
SCATTERING_LENGTH_SR88 = 5.088e-6 * 1e3  # 5088 pm

#: Intermediate-state decay of the Sr 689 nm line, gamma_p/2pi = 7.6 kHz.
GAMMA_P_SR_MHZ = 7.6e-3


def rad_per_us(nu_mhz: float) -> float:
    """Convert a frequency quoted as nu/2pi in MHz to angular rad/us."""
    return TWO_PI * nu_mhz


def mhz(omega_rad_per_us: float) -> float:
    """Convert an angular rate in rad/us back to nu/2pi in MHz."""
    return omega_rad_per_us / TWO_PI


def khz(omega_rad_per_us: float) -> float:
    return omega_rad_per_us / TWO_PI * 1e3


def hz(omega_rad_per_us: float) -> float:
    return omega_rad_per_us / TWO_PI * 1e6
