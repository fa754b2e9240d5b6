import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rydress import AtomSpecies, DressingParams, LockMode, c6_from_n, derive_lock_rates
from rydress.units import TWO_PI, hz, khz, mhz, rad_per_us, HBAR_OVER_M_SR88


def test_mhz_roundtrip_machine_precision():
    for value in (0.0076, 0.5, 1.0, 10.0, 73e6, 1e-7):
        assert mhz(rad_per_us(value)) == pytest.approx(value, rel=4e-16)


def test_unit_helpers():
    assert khz(TWO_PI) == pytest.approx(1e3)
    assert hz(TWO_PI) == pytest.approx(1e6)


def test_sr88_constants():
    # hbar/m for an 88 u atom is ~7.2e-4 um^2/us
    assert 7.0e-4 < HBAR_OVER_M_SR88 < 7.5e-4
    sp = AtomSpecies.sr88()
    assert sp.scattering_length == pytest.approx(5.088e-3)
    assert sp.g_3d == pytest.approx(4 * math.pi * sp.hbar_over_m * sp.scattering_length)
    # 2D reduction helper
    assert sp.g_2d(1.0) == pytest.approx(sp.g_3d / math.sqrt(2 * math.pi))


class TestLockRates:
    def test_out_of_phase_equal_linewidths(self):
        p = DressingParams.from_mhz(1, 40, 10, gamma1=0.05, gamma2=0.05, lock="out_of_phase")
        ggg, gpp, gee = derive_lock_rates(p)
        assert ggg == pytest.approx(0.0, abs=1e-15)
        assert gpp == pytest.approx(rad_per_us(0.05))
        assert gee == pytest.approx(0.0, abs=1e-15)

    def test_unlocked_equal_linewidths(self):
        p = DressingParams.from_mhz(1, 40, 10, gamma1=0.05, gamma2=0.05, lock="unlocked")
        ggg, gpp, gee = derive_lock_rates(p)
        assert ggg == pytest.approx(rad_per_us(0.05))
        assert gpp == pytest.approx(0.0, abs=1e-15)
        assert gee == pytest.approx(rad_per_us(0.05))

    def test_unlocked_unequal_linewidths(self):
        # direct substitution into the closed forms with gamma_lock = g1 + g2:
        # Gamma_gg = g1, Gamma_pp = 0, Gamma_ee = g2
        p = DressingParams.from_mhz(1, 40, 10, gamma1=0.050, gamma2=0.076, lock="unlocked")
        ggg, gpp, gee = derive_lock_rates(p)
        assert ggg == pytest.approx(rad_per_us(0.050))
        assert gpp == pytest.approx(0.0, abs=1e-12)
        assert gee == pytest.approx(rad_per_us(0.076))

    def test_custom_inside_interval(self):
        g1, g2 = rad_per_us(0.05), rad_per_us(0.08)
        gl = 0.5 * (abs(g1 - g2) + g1 + g2)
        p = DressingParams(omega1=1.0, omega2=10.0, delta=5.0,
                           gamma1=g1, gamma2=g2, lock=LockMode.custom(gl))
        rates = derive_lock_rates(p)
        assert all(r >= 0 for r in rates)
        # the closed forms sum to (gamma_lock + gamma1 + gamma2) / 2
        assert sum(rates) == pytest.approx((gl + g1 + g2) / 2)

    def test_custom_outside_interval_rejected(self):
        with pytest.raises(ValueError, match="admissible"):
            DressingParams(omega1=1.0, omega2=10.0, delta=5.0,
                           gamma1=1.0, gamma2=1.0, lock=LockMode.custom(3.0))

    @given(g1=st.floats(0.0, 5.0), g2=st.floats(0.0, 5.0), frac=st.floats(0.0, 1.0))
    def test_rates_non_negative_property(self, g1, g2, frac):
        lo, hi = abs(g1 - g2), g1 + g2
        gl = lo + frac * (hi - lo)
        p = DressingParams(omega1=1.0, omega2=10.0, delta=5.0,
                           gamma1=g1, gamma2=g2, lock=LockMode.custom(gl))
        rates = derive_lock_rates(p)
        assert min(rates) >= 0
        assert sum(rates) == pytest.approx((gl + g1 + g2) / 2, abs=1e-12)


class TestDressingParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            DressingParams(omega1=1.0, omega2=0.0, delta=5.0)
        with pytest.raises(ValueError):
            DressingParams(omega1=-1.0, omega2=1.0, delta=5.0)
        with pytest.raises(ValueError):
            DressingParams(omega1=1.0, omega2=1.0, delta=0.0)
        with pytest.raises(ValueError):
            DressingParams(omega1=1.0, omega2=1.0, delta=5.0, gamma_p=-1.0)

    def test_omega1_zero_allowed(self):
        p = DressingParams(omega1=0.0, omega2=1.0, delta=5.0)
        assert p.rydberg_fraction == 0.0

    def test_from_mhz_conversion(self):
        p = DressingParams.from_mhz(omega1=0.5, omega2=40.0, delta=10.0)
        assert p.omega1 == pytest.approx(rad_per_us(0.5))
        assert p.eit_bandwidth == pytest.approx(rad_per_us(40.0) ** 2 / (4 * rad_per_us(10.0)))

    def test_derived_quantities(self):
        p = DressingParams.from_mhz(omega1=1.0, omega2=40.0, delta=10.0)
        assert p.rydberg_fraction == pytest.approx((1.0 / 40.0) ** 2)


class TestC6Table:
    def test_anchor_points(self):
        assert c6_from_n(24) == pytest.approx(rad_per_us(0.12))
        assert c6_from_n(100) == pytest.approx(rad_per_us(73e6))

    def test_monotone_in_n(self):
        values = [c6_from_n(n) for n in (24, 40, 60, 80, 100)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            c6_from_n(23)
        with pytest.raises(ValueError):
            c6_from_n(101)

    def test_default_in_params(self):
        p = DressingParams.from_mhz(omega1=1.0, omega2=40.0, delta=10.0, n=100)
        assert p.c6 == pytest.approx(rad_per_us(73e6))
