import numpy as np
import pytest

from _signals import bump_train
from affectpipe import gsr
from affectpipe.data import SignalBlock

RATE = 32.0


HALF_SAMPLE = 0.5 / RATE  # avoid smoothed plateaus on exact samples


def block(x, rate=RATE):
    return SignalBlock("GSR", rate, np.asarray(x, dtype=float)[None, :])


class TestGsrFeatures:
    def test_names_and_length(self):
        fv = gsr.gsr_features(block(np.random.default_rng(0).normal(size=320)))
        assert fv.names == ("n_peaks", "mean_abs_peak_height", "mean", "std",
                            "skewness", "kurtosis", "mean_abs_diff1",
                            "mean_abs_diff2")
        assert len(fv) == 8

    def test_constant_signal_degenerate_conventions(self):
        fv = gsr.gsr_features(block(np.full(320, 4.5)))
        assert fv.values.tolist() == [0.0, 0.0, 4.5, 0.0, 0.0, 0.0, 0.0, 0.0]

    def test_three_separated_bumps_counted(self):
        centers = np.array([2.0, 4.0, 6.5]) + HALF_SAMPLE
        x = bump_train(centers, RATE, 10.0, width_s=0.2)
        fv = gsr.gsr_features(block(x))
        assert fv.values[0] == 3.0
        assert fv.values[1] > 0.0

    def test_bumps_within_separation_merged(self):
        centers = np.array([2.0, 2.6, 6.0]) + HALF_SAMPLE
        x = bump_train(centers, RATE, 10.0, width_s=0.15)
        fv = gsr.gsr_features(block(x))
        assert fv.values[0] == 2.0

    def test_linear_ramp_difference_stats(self):
        m = 0.8
        t = np.arange(int(20 * 128)) / 128.0
        fv = gsr.gsr_features(block(m * t, rate=128.0))
        assert fv.values[6] == pytest.approx(m / 128.0, rel=0.02)
        assert fv.values[7] == pytest.approx(0.0, abs=m / 128.0 * 0.01)

    def test_offset_changes_only_mean(self):
        x = bump_train(np.array([2.0, 5.0, 8.0]) + HALF_SAMPLE,
                       RATE, 10.0, width_s=0.2)
        x += np.random.default_rng(1).normal(0, 0.05, size=x.shape)
        a = gsr.gsr_features(block(x)).values
        b = gsr.gsr_features(block(x + 3.0)).values
        assert b[0] == a[0]                                   # n_peaks
        assert b[2] == pytest.approx(a[2] + 3.0, abs=1e-9)    # mean
        for i in (3, 4, 5, 6, 7):
            assert b[i] == pytest.approx(a[i], abs=1e-9)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            gsr.gsr_features(block(np.zeros(int(1.5 * RATE))))

    def test_wrong_modality_rejected(self):
        bad = SignalBlock("ECG", RATE, np.zeros((2, 320)))
        with pytest.raises(ValueError):
            gsr.gsr_features(bad)
