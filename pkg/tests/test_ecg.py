import numpy as np
import pytest

from _signals import bump_train
from affectpipe import ecg
from affectpipe.data import SignalBlock

RATE = 128.0


# bump centers sit halfway between samples: a center on an exact sample
# makes the smoothed top a 2-sample plateau with no strict local maximum
HALF_SAMPLE = 0.5 / RATE


def one_hz_train(duration_s=60.0, rate=RATE, height=1.0):
    centers = np.arange(0.5, duration_s, 1.0) + HALF_SAMPLE
    return bump_train(centers, rate, duration_s, height=height)


class TestCleanEcg:
    def test_constant_unchanged(self):
        x = np.full(512, 2.0)
        assert np.array_equal(ecg.clean_ecg(x, RATE), x)

    def test_isolated_spike_attenuated(self):
        x = np.zeros(512)
        x[256] = 8.0
        out = ecg.clean_ecg(x, RATE)
        assert out.max() <= 8.0 / (0.25 * RATE) + 1e-12

    def test_length_preserved(self):
        x = np.random.default_rng(0).normal(size=300)
        assert ecg.clean_ecg(x, RATE).shape == x.shape


class TestExtractRr:
    def test_one_hz_train_59_intervals_of_1000ms(self):
        rr = ecg.extract_rr(one_hz_train(), RATE)
        assert len(rr) == 59
        assert all(v == 1000.0 for v in rr.intervals_ms)

    def test_alternating_800_860_spacing(self):
        gaps = [0.80, 0.86] * 40
        centers = 0.5 + HALF_SAMPLE + np.concatenate([[0.0], np.cumsum(gaps)])
        dur = centers[-1] + 1.0
        x = bump_train(centers, RATE, dur)
        rr = ecg.extract_rr(x, RATE)
        assert len(rr) == len(centers) - 1
        one_sample_ms = 1000.0 / RATE
        for i, v in enumerate(rr.intervals_ms):
            want = 800.0 if i % 2 == 0 else 860.0
            assert abs(v - want) <= one_sample_ms

    def test_t_wave_bumps_rejected(self):
        r_centers = np.arange(0.5, 60.0, 1.0) + HALF_SAMPLE
        x = bump_train(r_centers, RATE, 60.0)
        x += bump_train(r_centers + 0.3, RATE, 60.0, height=0.6)
        rr = ecg.extract_rr(x, RATE)
        assert len(rr) == 59
        np.testing.assert_allclose(rr.intervals_ms, 1000.0, atol=1000 / RATE)

    def test_flat_signal_empty_series(self):
        rr = ecg.extract_rr(np.zeros(int(10 * RATE)), RATE)
        assert len(rr) == 0

    def test_single_beat_empty_series(self):
        x = bump_train([5.0], RATE, 10.0)
        assert len(ecg.extract_rr(x, RATE)) == 0

    def test_too_short_signal_rejected(self):
        with pytest.raises(ValueError):
            ecg.extract_rr(np.zeros(int(1.5 * RATE)), RATE)

    def test_amplitude_scaling_invariant(self):
        x = one_hz_train()
        x += np.random.default_rng(1).normal(0, 0.02, size=x.shape)
        assert ecg.extract_rr(2.0 * x, RATE) == ecg.extract_rr(x, RATE)
        assert ecg.extract_rr(0.125 * x, RATE) == ecg.extract_rr(x, RATE)

    def test_intervals_respect_refractory(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=int(30 * RATE))
        rr = ecg.extract_rr(x, RATE, threshold_stds=0.5)
        assert all(v >= 500.0 for v in rr.intervals_ms)


class TestPnn50:
    def test_constant_rr_zero(self):
        assert ecg.pnn50(ecg.RrSeries((1000.0,) * 10)) == 0.0

    def test_alternating_60ms_changes(self):
        assert ecg.pnn50(ecg.RrSeries((800.0, 860.0, 800.0, 860.0))) == 1.0

    def test_40ms_changes_below_strict_threshold(self):
        assert ecg.pnn50(ecg.RrSeries((800.0, 840.0, 800.0))) == 0.0

    def test_exact_50ms_not_counted(self):
        assert ecg.pnn50(ecg.RrSeries((800.0, 850.0))) == 0.0

    def test_time_reversal_invariant(self):
        rng = np.random.default_rng(3)
        ivals = tuple(800.0 + 200.0 * rng.random(30))
        fwd = ecg.pnn50(ecg.RrSeries(ivals))
        rev = ecg.pnn50(ecg.RrSeries(ivals[::-1]))
        assert fwd == rev

    def test_needs_two_intervals(self):
        with pytest.raises(ValueError):
            ecg.pnn50(ecg.RrSeries((1000.0,)))


class TestEcgFeatures:
    def _block(self, ch1, ch2):
        return SignalBlock("ECG", RATE, np.vstack([ch1, ch2]))

    def test_identical_channels_equal_features(self):
        x = one_hz_train()
        fv = ecg.ecg_features(self._block(x, x))
        assert fv.names == ("pnn50_ch1", "pnn50_ch2")
        assert fv.values[0] == fv.values[1]

    def test_jittered_beats_exceed_metronomic(self):
        # alternate 0.74/0.86 s gaps: every successive change is 120 ms
        gaps = [0.74, 0.86] * 35
        centers = 0.5 + HALF_SAMPLE + np.concatenate([[0.0], np.cumsum(gaps)])
        dur = centers[-1] + 1.0
        jitter = bump_train(centers, RATE, dur)
        steady = bump_train(np.arange(0.5, dur - 0.5, 0.8) + HALF_SAMPLE,
                            RATE, dur)
        fv = ecg.ecg_features(self._block(jitter, steady))
        assert fv.values[0] > fv.values[1]
        assert fv.values[1] == 0.0

    def test_flat_channel_gives_none(self):
        x = one_hz_train(duration_s=20.0)
        flat = np.zeros_like(x)
        assert ecg.ecg_features(self._block(x, flat)) is None

    def test_wrong_channel_count_rejected(self):
        block = SignalBlock("GSR", RATE, np.zeros((1, 512)))
        with pytest.raises(ValueError):
            ecg.ecg_features(block)
