"""ECG cleaning, R-peak extraction, and pNN50 heart-rate variability."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dsp
from .data import FeatureVector, SignalBlock

CLEAN_WINDOW_S = 0.25
MIN_PEAK_SEPARATION_S = 0.5
PEAK_THRESHOLD_STDS = 1.5
PNN_THRESHOLD_MS = 50.0

FEATURE_NAMES = ("pnn50_ch1", "pnn50_ch2")


@dataclass(frozen=True)
class RrSeries:
    """Successive inter-beat gaps in milliseconds."""

    intervals_ms: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ivals = tuple(float(v) for v in self.intervals_ms)
        if any(not np.isfinite(v) or v <= 0 for v in ivals):
            raise ValueError("intervals must be positive and finite")
        object.__setattr__(self, "intervals_ms", ivals)

    def __len__(self) -> int:
        return len(self.intervals_ms)


def clean_ecg(ecg_channel, rate_hz: float) -> np.ndarray:
    return dsp.moving_average(ecg_channel, rate_hz, CLEAN_WINDOW_S)


def extract_rr(ecg_channel, rate_hz: float,
               threshold_stds: float = PEAK_THRESHOLD_STDS) -> RrSeries:
    """Detect R peaks on the cleaned signal and return their gaps.

    The 0.5 s refractory window suppresses T-wave bumps; fewer than two
    detected peaks yields an empty series (the trial then carries no ECG
    features).
    """
    x = np.asarray(ecg_channel, dtype=np.float64)
    if x.size < 2 * rate_hz:
        raise ValueError("need at least 2 s of ECG signal")
    cleaned = clean_ecg(x, rate_hz)
    height = dsp.adaptive_threshold(cleaned, threshold_stds)
    peaks = dsp.detect_peaks(cleaned, rate_hz, MIN_PEAK_SEPARATION_S, height)
    if len(peaks) < 2:
        return RrSeries()
    idx = np.array([i for i, _ in peaks], dtype=np.float64)
    intervals = np.diff(idx) * (1000.0 / rate_hz)
    return RrSeries(tuple(intervals))


def pnn50(rr: RrSeries) -> float:
    """Fraction of successive-interval changes strictly above 50 ms."""
    if len(rr) < 2:
        raise ValueError("pnn50 needs at least 2 intervals")
    diffs = np.abs(np.diff(rr.intervals_ms))
    return float(np.mean(diffs > PNN_THRESHOLD_MS))


def ecg_features(ecg: SignalBlock) -> FeatureVector | None:
    """One pNN50 per channel; None when either channel lacks enough beats."""
    if ecg.modality != "ECG" or ecg.channel_count != 2:
        raise ValueError("expected a 2-channel ECG block")
    values = []
    for ch in range(2):
        rr = extract_rr(ecg.samples[ch], ecg.sample_rate_hz)
        if len(rr) < 2:
            return None
        values.append(pnn50(rr))
    return FeatureVector(FEATURE_NAMES, np.array(values))
