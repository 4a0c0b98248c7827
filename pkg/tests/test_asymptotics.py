"""Zero-spectral-efficiency limits: roots, bit energies, slopes and Theorem-style properties."""

import math

import numpy as np
import pytest

from qos_effcap.asymptotics import (
    TEN_LOG10_2, bit_energy_gap_db, linear_approximation, linear_bit_energy_db, lowpower_alpha_star,
    lowpower_beta, lowpower_limits, uniqueness_scan, wideband_alpha_star, wideband_delta,
    wideband_limits, wideband_ratio_monotonicity_check,
)
from qos_effcap.effcap import SystemParams, optimize_rate
from qos_effcap.errors import ParameterError
from qos_effcap.fading import FadingModel

T = 2e-3
RAYLEIGH = FadingModel.rayleigh()
AWGN_EB_MIN_DB = 10 * math.log10(math.log(2))


class TestLowPowerRoot:
    @pytest.mark.parametrize("model,expected", [
        (RAYLEIGH, 1.0),
        (FadingModel.rayleigh(3.0), 3.0),
        # mpmath roots of a p(a) = P{z > a}
        (FadingModel.nakagami(0.6), 1.2763547911924881),
        (FadingModel.nakagami(2), (1 + math.sqrt(5)) / 4),
        (FadingModel.gamma(3, 2.0), 1.1347654210405714),
    ], ids=str)
    def test_root(self, model, expected):
        assert lowpower_alpha_star(model) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_root_below_mean(self, n):
        m = FadingModel.gamma(n, 1.5)
        a = lowpower_alpha_star(m)
        assert 0 < a <= m.mean * (1 + 1e-12)
        assert a * m.pdf(a) == pytest.approx(m.ccdf(a), rel=1e-10)

    def test_scale_equivariance(self):
        # z -> c z scales the root by c
        base = lowpower_alpha_star(FadingModel.gamma(4, 1.0))
        assert lowpower_alpha_star(FadingModel.gamma(4, 0.25)) == pytest.approx(4 * base, rel=1e-12)


class TestWidebandRoot:
    @pytest.mark.parametrize("delta", [1e-6, 1e-3, 0.1, 1.0, 20.0, 500.0])
    def test_rayleigh_closed_form(self, delta):
        # unit hazard ratio: delta a = log(1 + delta)
        assert wideband_alpha_star(delta, RAYLEIGH) == pytest.approx(math.log1p(delta) / delta,
                                                                     rel=1e-12)

    def test_delta_zero_is_lowpower_root(self):
        m = FadingModel.nakagami(0.6)
        assert wideband_alpha_star(0.0, m) == lowpower_alpha_star(m)
        assert wideband_alpha_star(1e-9, m) == pytest.approx(lowpower_alpha_star(m), rel=1e-8)

    @pytest.mark.parametrize("model", [FadingModel.nakagami(0.6), FadingModel.nakagami(2),
                                       FadingModel.gamma(3, 0.5)], ids=str)
    def test_fixed_point_residual(self, model):
        d = 0.7
        a = wideband_alpha_star(d, model)
        assert d * a == pytest.approx(math.log1p(d * model.hazard_ratio(a)), rel=1e-10)

    def test_decreasing_in_delta(self):
        m = FadingModel.nakagami(2)
        roots = [wideband_alpha_star(d, m) for d in (0.0, 0.01, 0.1, 1.0, 10.0)]
        assert np.all(np.diff(roots) < 0)

    def test_rejects_negative_delta(self):
        with pytest.raises(ParameterError):
            wideband_alpha_star(-1.0, RAYLEIGH)


class TestWidebandLimits:
    def test_delta_definition(self):
        assert wideband_delta(0.01, T, 1e4) == pytest.approx(0.2 / math.log(2))

    def test_theta_zero_exact_limits(self):
        r = wideband_limits(0.0, T, 1e4, RAYLEIGH)
        assert r.alpha_star == pytest.approx(1.0, rel=1e-12)
        assert r.eb_n0_zero == pytest.approx(math.e * math.log(2), rel=1e-12)
        assert r.wideband_slope == pytest.approx(2 / math.e, rel=1e-12)
        assert r.is_minimum

    def test_continuous_at_theta_zero(self):
        r0 = wideband_limits(0.0, T, 1e4, FadingModel.nakagami(2))
        r1 = wideband_limits(1e-9, T, 1e4, FadingModel.nakagami(2))
        assert r1.eb_n0_zero_db == pytest.approx(r0.eb_n0_zero_db, abs=1e-6)
        assert r1.wideband_slope == pytest.approx(r0.wideband_slope, rel=1e-5)

    def test_monotone_in_theta(self):
        res = [wideband_limits(th, T, 1e4, RAYLEIGH) for th in (0, 1e-3, 1e-2, 1e-1, 1)]
        assert np.all(np.diff([r.eb_n0_zero_db for r in res]) > 0)
        assert np.all(np.diff([r.wideband_slope for r in res]) > 0)

    def test_large_m_approaches_unfaded_channel(self):
        res = [wideband_limits(0.01, T, 1e4, FadingModel.nakagami(m)) for m in (5, 50, 500, 2000)]
        eb = [r.eb_n0_zero_db for r in res]
        s0 = [r.wideband_slope for r in res]
        assert np.all(np.diff(eb) < 0) and eb[-1] > AWGN_EB_MIN_DB
        assert np.all(np.diff(s0) > 0) and s0[-1] < 2.0
        assert eb[-1] - AWGN_EB_MIN_DB < 0.3

    @pytest.mark.parametrize("theta", [0.01, 0.1])
    def test_matches_optimized_curve(self, theta):
        # the optimized point at very large B sits on the limit
        lim = wideband_limits(theta, T, 1e4, RAYLEIGH)
        pts = [optimize_rate(SystemParams.from_power(T, B, theta, 1e4), RAYLEIGH) for B in (1e9, 2e9)]
        assert pts[1].bit_energy_db == pytest.approx(lim.eb_n0_zero_db, abs=1e-4)
        assert pts[1].alpha_opt == pytest.approx(lim.alpha_star, rel=1e-5)
        slope = ((pts[0].spectral_efficiency - pts[1].spectral_efficiency)
                 / (pts[0].bit_energy_db - pts[1].bit_energy_db) * TEN_LOG10_2)
        assert slope == pytest.approx(lim.wideband_slope, rel=1e-4)

    def test_rejects(self):
        with pytest.raises(ParameterError):
            wideband_limits(-1.0, T, 1e4, RAYLEIGH)
        with pytest.raises(ParameterError):
            wideband_limits(0.01, T, 0.0, RAYLEIGH)


class TestLowPowerLimits:
    def test_beta_definition(self):
        assert lowpower_beta(0.01, T, 1e5) == pytest.approx(2 / math.log(2))

    def test_bit_energy_independent_of_theta(self):
        m = FadingModel.nakagami(0.6)
        ebs = {lowpower_limits(th, T, 1e5, m).eb_n0_zero_db for th in (0, 1e-3, 1e-2, 1e-1, 1)}
        assert len(ebs) == 1

    def test_theta_zero_slope(self):
        m = FadingModel.nakagami(2)
        r = lowpower_limits(0.0, T, 1e5, m)
        assert r.wideband_slope == pytest.approx(2 * m.ccdf(r.alpha_star), rel=1e-14)

    def test_slope_decreasing_in_theta(self):
        s0 = [lowpower_limits(th, T, 1e5, RAYLEIGH).wideband_slope for th in (0, 1e-3, 1e-2, 1e-1, 1)]
        assert np.all(np.diff(s0) < 0)

    def test_minimum_flag(self):
        assert lowpower_limits(0.01, T, 1e5, FadingModel.gamma(3, 1)).is_minimum
        assert lowpower_limits(0.0, T, 1e5, FadingModel.nakagami(0.6)).is_minimum
        assert not lowpower_limits(0.01, T, 1e5, FadingModel.nakagami(0.6)).is_minimum

    @pytest.mark.parametrize("theta", [0.01, 0.1])
    def test_matches_optimized_curve(self, theta):
        lim = lowpower_limits(theta, T, 1e5, RAYLEIGH)
        pts = [optimize_rate(SystemParams(T, 1e5, theta, s), RAYLEIGH) for s in (1e-5, 2e-5)]
        assert pts[0].bit_energy_db == pytest.approx(lim.eb_n0_zero_db, abs=1e-3)
        slope = ((pts[1].spectral_efficiency - pts[0].spectral_efficiency)
                 / (pts[1].bit_energy_db - pts[0].bit_energy_db) * TEN_LOG10_2)
        assert slope == pytest.approx(lim.wideband_slope, rel=1e-3)


class TestLinearApproximation:
    def test_round_trip(self):
        lim = lowpower_limits(0.01, T, 1e5, RAYLEIGH)
        eb = linear_bit_energy_db(0.05, lim)
        assert linear_approximation(eb, lim) == pytest.approx(0.05, rel=1e-14)

    def test_clamped_below_intercept(self):
        lim = lowpower_limits(0.01, T, 1e5, RAYLEIGH)
        out = linear_approximation(np.array([lim.eb_n0_zero_db - 1, lim.eb_n0_zero_db]), lim)
        np.testing.assert_array_equal(out, [0.0, 0.0])

    def test_gap(self):
        s_a, s_b = 0.7358, 0.2605
        gap = bit_energy_gap_db(s_a, s_b, 0.1)
        assert gap == pytest.approx((1 / s_b - 1 / s_a) * 0.1 * TEN_LOG10_2)
        assert gap > 0
        with pytest.raises(ParameterError):
            bit_energy_gap_db(0.0, 1.0, 0.1)


class TestStructuralChecks:
    @pytest.mark.parametrize("m", [0.6, 1.5, 2.5])
    def test_uniqueness_scan_non_integer(self, m):
        assert uniqueness_scan(FadingModel.nakagami(m), points=2000) == 1

    def test_ratio_monotone_small_grid(self):
        rep = wideband_ratio_monotonicity_check(0.01, T, 1e4, RAYLEIGH, np.geomspace(1e-9, 1e-4, 6))
        assert rep.passed
        assert rep.ratio.shape == (6,)

    def test_ratio_check_validates(self):
        with pytest.raises(ParameterError):
            wideband_ratio_monotonicity_check(0.0, T, 1e4, RAYLEIGH, [1e-6, 1e-5])
        with pytest.raises(ParameterError):
            wideband_ratio_monotonicity_check(0.01, T, 1e4, RAYLEIGH, [1e-5, 1e-6])
