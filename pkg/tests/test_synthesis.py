import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwm_forge import (
    ClippingDetected,
    FrozenZoneConflict,
    UndersampledRate,
    sample,
    spwm_reference,
    synthesize,
    triangle,
)
from pwm_forge.laws import TWO_PI
from pwm_forge.synthesis import SwitchedWaveform, carrier_value

from conftest import default_config, wave_for

DEFAULT_GRID = [dict(k=k) for k in (0.0, 0.3, 0.5, 0.8, 0.9)] + [
    dict(strategy="SPWM"), dict(strategy="HIPWM_FIXED"), dict(k=0.5, mean_order=9),
    dict(k=0.5, mean_order=27),
]


def _phase(w):
    return w.times * TWO_PI / w.period


def _brute_levels(cfg, x):
    """Comparator evaluated directly with a transcendental triangle (no edge solver)."""
    from pwm_forge.laws import build_carrier_law

    law = build_carrier_law(cfg)
    theta = law.theta_of_phase(x)
    carrier = (2 / math.pi) * np.arcsin(np.sin(theta - math.pi / 2))
    return cfg.modulator(x) > carrier


class TestTriangle:
    @pytest.mark.parametrize("theta, expected", [(0.0, 0.0), (math.pi / 2, 1.0),
                                                 (3 * math.pi / 2, -1.0), (7 * math.pi / 4, -0.5)])
    def test_values(self, theta, expected):
        assert triangle(theta) == pytest.approx(expected, abs=1e-15)

    def test_rising_at_zero(self):
        assert triangle(1e-6) > 0 > triangle(-1e-6)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(-1e3, 1e3))
    def test_matches_arcsin_form(self, th):
        assert triangle(th) == pytest.approx((2 / math.pi) * math.asin(math.sin(th)), abs=1e-9)


class TestSpwm:
    def test_edge_count_and_brute_force(self, spwm_wave):
        # brute-force oracle: count comparator transitions on a fine grid
        x = np.linspace(0, TWO_PI, 4_000_001)[:-1]
        s = _brute_levels(default_config(strategy="SPWM"), x)
        assert np.count_nonzero(s != np.roll(s, 1)) == 30
        assert spwm_wave.edge_count == 30

    def test_quarter_wave_symmetry(self, spwm_wave):
        x = np.sort(_phase(spwm_wave))
        # even about 0 and antisymmetric about pi/2 -> edges mirror around 0 and pi
        assert np.allclose(np.sort(np.mod(-x, TWO_PI)), x, atol=1e-10)
        assert np.allclose(np.sort(np.mod(math.pi - x, TWO_PI)), x, atol=1e-10)

    def test_zero_index_alternates_at_carrier_rate(self):
        w = spwm_reference(default_config(strategy="SPWM", amplitude_index=0.0))
        assert w.edge_count == 30
        x = np.sort(_phase(w))
        assert np.allclose(np.diff(x), TWO_PI / 30, atol=1e-9)

    def test_reference_from_other_strategy(self):
        w = spwm_reference(default_config())
        assert w.meta["config"].strategy.value == "SPWM"


class TestFmtc3:
    def test_clamped_zones_have_no_edges(self, default_wave):
        x = _phase(default_wave)
        q = math.pi / 4
        dist0 = np.minimum(x, TWO_PI - x)
        assert not np.any(dist0 < q - 1e-12)
        assert not np.any(np.abs(x - math.pi) < q - 1e-12)

    def test_clamp_levels(self, default_wave):
        T = default_wave.period
        x = np.linspace(-0.7, 0.7, 101) * math.pi / 4
        assert np.all(default_wave.level_at(x / TWO_PI * T) == 1.0)
        assert np.all(default_wave.level_at((x + math.pi) / TWO_PI * T) == -1.0)
        assert default_wave.initial_level == 1.0

    def test_untruncated_has_edges_everywhere(self):
        w = wave_for(k=0.0)
        x = np.sort(_phase(w))
        gaps = np.diff(np.concatenate((x, [x[0] + TWO_PI])))
        # pulsation still vanishes at 0 and pi, so the widest gap sits there but stays
        # well short of the pi/2 clamp zone at k = 0.5
        assert gaps.max() < math.pi / 2
        assert not w.meta["law"].frozen_zones()

    @pytest.mark.parametrize("kw", DEFAULT_GRID)
    def test_against_brute_force_levels(self, kw):
        cfg = default_config(**kw)
        w = wave_for(**kw)
        x = np.linspace(0, TWO_PI, 200_001)[:-1] + 1.234e-6
        got = w.level_at(x / TWO_PI * w.period) > 0
        want = _brute_levels(cfg, x)
        for a, b in w.meta["law"].frozen_zones():
            inside = (x > a) & (x < b)
            mid_level = got[inside]
            if inside.any():
                assert np.all(mid_level == mid_level[0])
            want = np.where(inside, got, want)
        # away from edges the two agree everywhere
        near = np.zeros_like(x, dtype=bool)
        for xe in _phase(w):
            near |= np.abs(x - xe) < 1e-6
        assert np.array_equal(got[~near], want[~near])

    @pytest.mark.parametrize("kw", DEFAULT_GRID)
    def test_structure(self, kw):
        w = wave_for(**kw)
        assert np.all(np.diff(w.times) > 0)
        assert np.all((w.times >= 0) & (w.times < w.period))
        lv = np.concatenate(([w.initial_level], w.values))
        assert np.all(lv[1:] != lv[:-1])

    @pytest.mark.parametrize("kw", [d for d in DEFAULT_GRID if d.get("strategy") is None])
    def test_edge_count_band(self, kw):
        w = wave_for(**kw)
        m = kw.get("mean_order", 15)
        assert 2 * m - 4 <= w.edge_count <= 2 * m + 4

    @pytest.mark.parametrize("k", [0.0, 0.5, 0.8])
    def test_edge_count_linear_in_order(self, k):
        orders = np.array([9, 15, 21, 27])
        counts = np.array([wave_for(k=k, mean_order=int(m)).edge_count for m in orders])
        slope = np.polyfit(orders, counts, 1)[0]
        assert slope == pytest.approx(2.0, rel=0.1)

    @pytest.mark.parametrize("kw", DEFAULT_GRID)
    def test_comparator_consistency(self, kw):
        cfg = default_config(**kw)
        w = wave_for(**kw)
        law = w.meta["law"]
        x = _phase(w)
        diff = cfg.modulator(x) - carrier_value(law, x)
        assert np.max(np.abs(diff)) <= 1e-8

    @pytest.mark.parametrize("kw", DEFAULT_GRID)
    def test_half_wave_antisymmetry(self, kw):
        w = wave_for(**kw)
        t = np.linspace(0, w.period / 2, 5001)[1:-1] + 1e-9 * w.period
        near = np.zeros_like(t, dtype=bool)
        for te in w.times:
            near |= np.abs(np.mod(t - te + w.period / 4, w.period / 2) - w.period / 4) < 1e-9 * w.period * 10
        a = w.level_at(t)[~near]
        b = w.level_at(t + w.period / 2)[~near]
        assert np.array_equal(a, -b)

    @pytest.mark.parametrize("k", [0.0, 0.5, 0.8])
    def test_periodicity_over_two_periods(self, k):
        from pwm_forge.laws import build_carrier_law

        cfg = default_config(k=k)
        w = wave_for(k=k)
        law = build_carrier_law(cfg)
        # edges of period two located independently on the second period
        x = np.linspace(TWO_PI, 2 * TWO_PI, 400_001)
        s = cfg.modulator(x) > carrier_value(law, x)
        idx = np.flatnonzero(s[1:] != s[:-1])
        lo, hi = x[idx], x[idx + 1]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            same = (cfg.modulator(mid) > carrier_value(law, mid)) == s[idx]
            lo, hi = np.where(same, mid, lo), np.where(same, hi, mid)
        second = 0.5 * (lo + hi) / TWO_PI * w.period
        assert len(second) == w.edge_count
        assert np.allclose(second, w.times + w.period, atol=w.period * 1e-9, rtol=0)


class TestWarnings:
    def test_clipping(self):
        with pytest.warns(ClippingDetected):
            synthesize(default_config(injection=[(1, 1.2)]))

    def test_literal_variant_uses_held_carrier(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            w = synthesize(default_config(carrier_variant="literal"))
        assert w.meta["clamp_rule"] == "held_carrier"
        # still periodic and two-level
        assert set(np.unique(w.values)) <= {-1.0, 1.0}

    def test_frozen_zone_conflict(self):
        # negative fundamental flips the clamp against the carrier trough at zone entry
        with pytest.warns(FrozenZoneConflict):
            w = synthesize(default_config(injection=[(1, -0.9)]))
        assert w.meta["conflicts"]

    def test_default_config_is_quiet(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            synthesize(default_config())


class TestSample:
    def test_constant(self):
        w = SwitchedWaveform(0.02, 1.0, np.array([]), np.array([]), (-1.0, 1.0))
        assert np.all(sample(w, 1000.0) == 1.0)

    def test_single_edge(self):
        T = 0.02
        w = SwitchedWaveform(T, -1.0, np.array([0.0, T / 2]), np.array([1.0, -1.0]), (-1.0, 1.0))
        assert sample(w, 4 / T).tolist() == [1.0, 1.0, -1.0, -1.0]

    def test_spwm_mean_is_zero(self, spwm_wave):
        s = sample(spwm_wave, 50.0 * 2**15)
        assert abs(np.mean(s)) < 1e-3 * 2.0

    def test_undersampled(self, default_wave):
        with pytest.raises(UndersampledRate):
            sample(default_wave, 10_000.0)

    def test_average_matches_hold_mean(self, default_wave):
        rate = 50.0 * 2**12
        avg = sample(default_wave, rate, method="average")
        assert np.mean(avg) == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.abs(avg) <= 1.0 + 1e-12)

    def test_deterministic(self, default_wave):
        a = sample(default_wave, 50.0 * 2**12, n_periods=2)
        b = sample(default_wave, 50.0 * 2**12, n_periods=2)
        assert np.array_equal(a, b)
        assert np.array_equal(a[: 2**12], a[2**12 :])
