import math

import numpy as np
import pytest

from rydress import (
    CalibrationRangeError,
    DressingParams,
    InteractionProfile,
    calibrate_omega1,
    default_r_grid,
    extract_features,
    inner_peak_radius_analytic,
    interaction_profile,
    outer_core_radius_analytic,
    outer_peak_radius_analytic,
    softcore_radius_analytic,
    sweep,
)
from rydress.units import rad_per_us

GAMMA_100HZ = rad_per_us(100e-6)


class TestAnalyticRadii:
    def test_softcore_quiet_reduction(self):
        # with quiet lasers the condition reduces to (2 delta c6 omega1 / omega2^3)^(1/6)
        p = DressingParams.from_mhz(omega1=0.8, omega2=20.0, delta=10.0)
        expected = (2 * p.delta * p.c6 * p.omega1 / p.omega2**3) ** (1 / 6)
        assert softcore_radius_analytic(p) == pytest.approx(expected)

    def test_softcore_shrinks_with_noise(self):
        radii = [
            softcore_radius_analytic(DressingParams.from_mhz(
                omega1=0.8, omega2=20.0, delta=10.0, gamma2=g2))
            for g2 in (0.0, 0.1, 1.0, 10.0)
        ]
        assert all(b < a for a, b in zip(radii, radii[1:]))

    def test_softcore_zero_rhs_rejected(self):
        p = DressingParams(omega1=0.0, omega2=rad_per_us(20), delta=rad_per_us(10))
        with pytest.raises(ValueError, match="zero right-hand side"):
            softcore_radius_analytic(p)

    def test_inner_peak_monotone_in_gamma2(self):
        radii = [
            inner_peak_radius_analytic(DressingParams.from_mhz(
                omega1=0.5, omega2=20.0, delta=10.0, gamma2=g2))
            for g2 in (0.01, 0.1, 1.0)
        ]
        assert all(b < a for a, b in zip(radii, radii[1:]))

    def test_inner_peak_vanishing_rydberg_decay(self):
        p = DressingParams.from_mhz(omega1=0.5, omega2=20.0, delta=10.0, gamma_r=0.0)
        assert inner_peak_radius_analytic(p) == 0.0

    def test_outer_peak_regimes(self):
        # omega2 > 2|delta| needs delta > 0; omega2 < 2|delta| needs delta < 0
        present = DressingParams.from_mhz(omega1=0.5, omega2=15.0, delta=3.0)
        absent = DressingParams.from_mhz(omega1=0.5, omega2=15.0, delta=-3.0)
        assert outer_peak_radius_analytic(present) is not None
        assert outer_peak_radius_analytic(absent) is None
        present_neg = DressingParams.from_mhz(omega1=0.5, omega2=8.0, delta=-10.0)
        absent_pos = DressingParams.from_mhz(omega1=0.5, omega2=8.0, delta=10.0)
        assert outer_peak_radius_analytic(present_neg) is not None
        assert outer_peak_radius_analytic(absent_pos) is None

    def test_outer_peak_collapses_at_two_photon_boundary(self):
        # approaching omega2 = 2 delta with tiny gamma_p the required potential
        # diverges and the radius collapses toward zero
        radii = [
            outer_peak_radius_analytic(DressingParams.from_mhz(
                omega1=0.5, omega2=20.0 + eps, delta=10.0, gamma_p=1e-9))
            for eps in (1.0, 1e-2, 1e-4, 1e-6)
        ]
        assert all(b < a for a, b in zip(radii, radii[1:]))
        assert radii[-1] < 0.5

    def test_outer_core_from_transparency_bandwidth(self):
        p = DressingParams.from_mhz(omega1=0.5, omega2=14.0, delta=10.0)
        r = outer_core_radius_analytic(p)
        assert p.c6 / r**6 == pytest.approx(2 * p.eit_bandwidth)


def synthetic_profile(r, u, gamma=None, params=None):
    gamma = np.zeros_like(u) if gamma is None else gamma
    return InteractionProfile(r=r, u=u, gamma=gamma, params=params)


class TestExtractFeatures:
    def test_pure_softcore(self):
        r = np.linspace(0.5, 12.0, 400)
        u0, rc = -2.0, 3.0
        prof = synthetic_profile(r, u0 / (1 + (r / rc) ** 6))
        f = extract_features(prof)
        assert f.u_c == pytest.approx(u0, rel=1e-3)
        assert f.r_c == pytest.approx(rc, rel=1e-3)  # half-value crossing
        assert f.u_ip is None and f.u_op is None and f.u_well is None

    def test_softcore_plus_gaussian(self):
        r = np.linspace(0.5, 15.0, 600)
        u = -1.0 / (1 + (r / 2.5) ** 6) + 0.8 * np.exp(-((r - 6.0) ** 2) / 0.5)
        f = extract_features(synthetic_profile(r, u))
        assert f.u_ip == pytest.approx(0.8, rel=0.01)
        assert f.r_ip == pytest.approx(6.0, abs=0.05)

    def test_nan_rejected(self):
        r = np.linspace(0.5, 12.0, 100)
        u = np.ones_like(r)
        u[3] = np.nan
        with pytest.raises(ValueError, match="NaN"):
            extract_features(synthetic_profile(r, u))

    def test_blue_profile_ordering(self, blue_params):
        # strongly noisy locked profile: attractive core, repulsive barrier,
        # attractive outer well
        prof = interaction_profile(blue_params, default_r_grid(blue_params))
        f = extract_features(prof)
        assert f.u_c < 0
        assert f.u_ip is not None and f.u_ip > 0
        assert f.u_well is not None and f.u_well < 0
        assert f.r_ip < f.r_well
        assert f.delta_eit == pytest.approx(blue_params.eit_bandwidth)

    def test_red_profile_well_is_outer_peak(self, red_params):
        # positive-detuning outer peak doubles as the attractive well with
        # enhanced loss on top of it
        prof = interaction_profile(red_params, default_r_grid(red_params))
        f = extract_features(prof)
        assert f.u_ip is not None and f.u_ip > 0
        assert f.u_op is not None and f.u_op < 0
        assert f.u_well == pytest.approx(f.u_op)

    def test_split_core_radii(self):
        # reduced omega2/2delta splits the soft core: r_ic = r_c and a second
        # shelf decays at the outer-core radius
        p = DressingParams.from_mhz(omega1=0.3, omega2=14.0, delta=10.0,
                                    gamma1=0.76, gamma2=0.76, lock="out_of_phase")
        prof = interaction_profile(p, default_r_grid(p))
        f = extract_features(prof)
        assert f.r_ic is not None and f.r_oc is not None
        assert f.r_ic == pytest.approx(f.r_c)
        assert f.r_ic <= f.r_ip <= f.r_oc

    def test_profile_grid_validation(self):
        with pytest.raises(ValueError):
            synthetic_profile(np.array([1.0, 0.5]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            synthetic_profile(np.array([-1.0, 0.5]), np.array([1.0, 1.0]))


class TestNumericVsAnalyticRadii:
    @pytest.mark.parametrize("omega2_over_2delta,delta_mhz", [(1.0, 10.0), (0.7, 10.0)])
    def test_inner_peak_agreement(self, omega2_over_2delta, delta_mhz):
        p = DressingParams.from_mhz(
            omega1=0.3, omega2=2 * delta_mhz * omega2_over_2delta, delta=delta_mhz,
            gamma1=0.76, gamma2=0.76, lock="out_of_phase")
        prof = interaction_profile(p, default_r_grid(p))
        f = extract_features(prof)
        assert f.r_ip is not None
        assert abs(f.r_ip - inner_peak_radius_analytic(p)) < 0.25 * inner_peak_radius_analytic(p)

    def test_outer_peak_agreement(self):
        p = DressingParams.from_mhz(omega1=0.3, omega2=15.0, delta=3.0,
                                    gamma1=0.76, gamma2=0.76, lock="out_of_phase")
        prof = interaction_profile(p, default_r_grid(p))
        f = extract_features(prof)
        r_op = outer_peak_radius_analytic(p)
        assert f.r_op is not None
        assert abs(f.r_op - r_op) < 0.25 * r_op

    def test_softcore_agreement(self, noisy_params):
        prof = interaction_profile(noisy_params, default_r_grid(noisy_params))
        f = extract_features(prof)
        rc = softcore_radius_analytic(noisy_params)
        assert abs(f.r_c - rc) < 0.25 * rc


class TestCalibration:
    def test_zero_target_rejected(self, noisy_params):
        with pytest.raises(CalibrationRangeError):
            calibrate_omega1(noisy_params, 0.0)

    def test_out_of_range_reports_bracket(self, noisy_params):
        with pytest.raises(CalibrationRangeError) as err:
            calibrate_omega1(noisy_params, rad_per_us(1.0))  # 1 MHz loss target
        assert err.value.bracket is not None

    def test_hits_target_within_tolerance(self, noisy_params):
        from rydress.steady import PairInteraction
        om1 = calibrate_omega1(noisy_params, GAMMA_100HZ)
        p = noisy_params.with_(omega1=om1)
        pi = PairInteraction(p)
        _, gam = pi.interaction_and_loss(default_r_grid(p, 240))
        assert np.max(gam) == pytest.approx(GAMMA_100HZ, rel=0.02)

    def test_monotone_scan_enforced(self, noisy_params):
        om1 = calibrate_omega1(noisy_params, GAMMA_100HZ)
        assert rad_per_us(0.1) <= om1 <= rad_per_us(2.0)


class TestSweep:
    def test_single_value_matches_direct(self, noisy_params):
        table = sweep(noisy_params, "gamma2", [noisy_params.gamma2])
        row = table.rows[0]
        prof = interaction_profile(noisy_params, default_r_grid(noisy_params))
        f = extract_features(prof)
        assert row.error is None
        assert row.features.u_c == pytest.approx(f.u_c, rel=1e-9)
        assert row.gamma_max == pytest.approx(prof.gamma_max, rel=1e-9)

    def test_gamma12_axis_sets_both(self, noisy_params):
        table = sweep(noisy_params, "gamma12", [rad_per_us(0.05)])
        assert table.rows[0].error is None

    def test_unknown_axis(self, noisy_params):
        with pytest.raises(ValueError, match="axis"):
            sweep(noisy_params, "bogus", [1.0])

    def test_thread_count_does_not_change_results(self, noisy_params):
        values = [rad_per_us(v) for v in (0.01, 0.05, 0.2)]
        t1 = sweep(noisy_params, "gamma2", values, threads=1)
        t2 = sweep(noisy_params, "gamma2", values, threads=2)
        for a, b in zip(t1.rows, t2.rows):
            assert a.features.u_c == b.features.u_c
            assert a.gamma_max == b.gamma_max


class TestInteractionProfile:
    def test_grid_spans_feature_range(self, noisy_params):
        grid = default_r_grid(noisy_params, 240)
        assert len(grid) == 240
        radii = [softcore_radius_analytic(noisy_params),
                 inner_peak_radius_analytic(noisy_params)]
        assert grid[0] < 0.5 * min(radii)
        assert grid[-1] > 2.0 * max(radii)

    def test_profile_interpolators_monotone_tail(self, noisy_params):
        prof = interaction_profile(noisy_params, default_r_grid(noisy_params, 240))
        u_interp, _ = prof.interpolators()
        r_fine = np.linspace(prof.r[0], prof.r[-1], 2000)
        vals = u_interp(r_fine)
        assert np.all(np.isfinite(vals))
        # monotone interpolation cannot overshoot the sampled range
        assert vals.max() <= prof.u.max() + 1e-12
        assert vals.min() >= prof.u.min() - 1e-12
