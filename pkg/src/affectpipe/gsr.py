"""Time-domain skin-conductance statistics for one trial."""

from __future__ import annotations

import numpy as np

from . import dsp
from .data import FeatureVector, SignalBlock

SMOOTH_WINDOW_S = 0.25
MIN_PEAK_SEPARATION_S = 1.0
PEAK_THRESHOLD_STDS = 1.0

FEATURE_NAMES = ("n_peaks", "mean_abs_peak_height", "mean", "std",
                 "skewness", "kurtosis", "mean_abs_diff1", "mean_abs_diff2")


def gsr_features(gsr: SignalBlock) -> FeatureVector:
    """Eight statistics of the smoothed conductance trace, fixed order."""
    if gsr.modality != "GSR" or gsr.channel_count != 1:
        raise ValueError("expected a 1-channel GSR block")
    x = gsr.samples[0]
    if x.size < 2 * gsr.sample_rate_hz:
        raise ValueError("need at least 2 s of GSR signal")
    smoothed = dsp.moving_average(x, gsr.sample_rate_hz, SMOOTH_WINDOW_S)
    height = dsp.adaptive_threshold(smoothed, PEAK_THRESHOLD_STDS)
    peaks = dsp.detect_peaks(smoothed, gsr.sample_rate_hz,
                             MIN_PEAK_SEPARATION_S, height)
    heights = [h for _, h in peaks]
    mean_abs_height = float(np.mean(np.abs(heights))) if heights else 0.0
    stats = dsp.summary_stats(smoothed)
    values = [float(len(peaks)), mean_abs_height,
              stats["mean"], stats["std"], stats["skewness"],
              stats["kurtosis"], stats["mean_abs_diff1"],
              stats["mean_abs_diff2"]]
    return FeatureVector(FEATURE_NAMES, np.array(values))
