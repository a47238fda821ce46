"""Modality-agnostic signal kernels: smoothing, peak picking, spectral
estimation, histogram entropy, summary statistics, PCA, and z-scoring.

Everything here is a pure function (or an immutable fitted model), so all
operations are safe to run data-parallel across trials.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels


def _as_signal(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a 1-D signal")
    if x.size == 0:
        raise ValueError("empty signal")
    return x


def moving_average(x, rate_hz: float, window_s: float) -> np.ndarray:
    """Centered moving mean; edge windows shrink to the available samples.

    For an even window the extra sample sits on the right: the window covers
    (w-1)//2 samples left and w//2 right of each position.
    """
    x = _as_signal(x)
    if window_s <= 0:
        raise ValueError("window_s must be positive")
    width = int(round(window_s * rate_hz))
    if width < 1:
        raise ValueError("window shorter than one sample")
    return _kernels.moving_average(x, width)


def adaptive_threshold(x, k: float) -> float:
    """mean + k*std of the signal; scale- and offset-equivariant."""
    x = _as_signal(x)
    return float(np.mean(x) + k * np.std(x))


def detect_peaks(x, rate_hz: float, min_separation_s: float,
                 min_height: float) -> list[tuple[int, float]]:
    """Strict local maxima above ``min_height`` with a refractory distance.

    Among maxima closer than ``min_separation_s`` the tallest wins (greedy by
    descending height, ties to the earlier index). Returned as ascending
    (index, height) pairs, pairwise separated by at least
    ``min_separation_s * rate_hz`` samples.
    """
    x = _as_signal(x)
    if min_separation_s < 0:
        raise ValueError("min_separation_s must be >= 0")
    candidates = _kernels.local_maxima(x, float(min_height))
    if candidates.size == 0:
        return []
    heights = x[candidates]
    min_sep = min_separation_s * rate_hz
    order = np.lexsort((candidates, -heights))
    kept: list[int] = []
    for j in order:
        idx = int(candidates[j])
        if all(abs(idx - other) >= min_sep for other in kept):
            kept.append(idx)
    kept.sort()
    return [(i, float(x[i])) for i in kept]


@dataclass(frozen=True)
class PsdEstimate:
    """One-sided power spectral density (units signal^2/Hz)."""

    freqs_hz: np.ndarray
    power: np.ndarray
    window_s: float
    hop_s: float


def welch_psd(x, rate_hz: float, window_s: float = 1.0,
              hop_s: float = 0.5) -> PsdEstimate:
    """Averaged periodogram over Hann-windowed, mean-removed segments.

    Normalized as a density: sum(power) * df approximates the variance of
    the signal (exact Parseval identity per segment).
    """
    x = _as_signal(x)
    nper = int(round(window_s * rate_hz))
    hop = max(int(round(hop_s * rate_hz)), 1)
    if nper < 2:
        raise ValueError("window shorter than two samples")
    if x.size < nper:
        raise ValueError(
            f"signal ({x.size} samples) shorter than one window ({nper})")
    n_seg = (x.size - nper) // hop + 1
    starts = np.arange(n_seg) * hop
    segments = x[starts[:, None] + np.arange(nper)[None, :]]
    segments = segments - segments.mean(axis=1, keepdims=True)
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(nper) / nper)
    spec = np.fft.rfft(segments * window, axis=1)
    power = (spec.real**2 + spec.imag**2) / (rate_hz * np.sum(window**2))
    if nper % 2 == 0:
        power[:, 1:-1] *= 2.0
    else:
        power[:, 1:] *= 2.0
    freqs = np.fft.rfftfreq(nper, 1.0 / rate_hz)
    return PsdEstimate(freqs_hz=freqs, power=power.mean(axis=0),
                       window_s=window_s, hop_s=hop_s)


def band_power(p: PsdEstimate, lo_hz: float, hi_hz: float) -> float:
    """Rectangular integral of the PSD over lo <= f < hi.

    The upper edge is exclusive so adjacent bands share no bin; as the one
    exception, hi at the top of the spectrum closes the interval so that a
    full partition recovers the total power.
    """
    f_max = float(p.freqs_hz[-1])
    if not (0 <= lo_hz < hi_hz <= f_max):
        raise ValueError(f"invalid band [{lo_hz}, {hi_hz}) for max {f_max} Hz")
    df = float(p.freqs_hz[1] - p.freqs_hz[0])
    mask = (p.freqs_hz >= lo_hz) & (p.freqs_hz < hi_hz)
    if hi_hz == f_max:
        mask |= p.freqs_hz == f_max
    return float(np.sum(p.power[mask]) * df)


def _entropy_bits(counts: np.ndarray, total: int) -> float:
    nz = counts[counts > 0]
    p = nz / total
    return float(-np.sum(p * np.log2(p)))


def conditional_entropy(x, y, n_bins: int) -> float:
    """H(X|Y) in bits from a joint histogram, H(X,Y) - H(Y).

    Each axis gets ``n_bins`` equal-width bins spanning that signal's own
    [min, max]; a constant axis collapses to a single bin. Result clamped to
    [0, log2(n_bins)].
    """
    x = _as_signal(x)
    y = _as_signal(y)
    if x.size != y.size:
        raise ValueError("signals must have equal length")
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    lo_x, hi_x = float(np.min(x)), float(np.max(x))
    lo_y, hi_y = float(np.min(y)), float(np.max(y))
    nbx = n_bins if hi_x > lo_x else 1
    nby = n_bins if hi_y > lo_y else 1
    counts = _kernels.joint_hist(x, y, lo_x, hi_x, nbx, lo_y, hi_y, nby)
    n = x.size
    h_joint = _entropy_bits(counts.ravel(), n)
    h_y = _entropy_bits(counts.sum(axis=0), n)
    return min(max(h_joint - h_y, 0.0), float(np.log2(n_bins)))


@dataclass(frozen=True)
class PcaModel:
    """Principal components of mean-centered data (rows orthonormal)."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]


def pca_fit(X, k: int) -> PcaModel:
    """Top-k right singular directions of the centered data.

    Sign convention: the largest-magnitude coordinate of each component is
    made positive, so the decomposition is deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if n < 2:
        raise ValueError("need at least 2 rows")
    if not 1 <= k <= min(n - 1, d):
        raise ValueError(f"k={k} out of range [1, {min(n - 1, d)}]")
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    components = vt[:k].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaModel(mean=mean, components=components,
                    explained_variance=s[:k] ** 2 / (n - 1))


def pca_transform(m: PcaModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != m.mean.shape[0]:
        raise ValueError("dimension mismatch with fitted PCA")
    return (X - m.mean) @ m.components.T


def pca_inverse(m: PcaModel, Y) -> np.ndarray:
    return m.mean + np.asarray(Y, dtype=np.float64) @ m.components


def summary_stats(x) -> dict[str, float]:
    """Time-domain summary of a 1-D sample.

    Population (biased) std; skewness/kurtosis are standardized central
    moments (kurtosis non-excess), both 0 for a constant input; p95 by
    linear interpolation at 0.95*(n-1); mean_abs_diffK is the mean absolute
    K-th difference (0 when fewer than K+1 samples).
    """
    x = _as_signal(x)
    mean = float(np.mean(x))
    std = float(np.std(x))
    if std > 0:
        z = (x - mean) / std
        skewness = float(np.mean(z**3))
        kurtosis = float(np.mean(z**4))
    else:
        skewness = 0.0
        kurtosis = 0.0
    d1 = np.diff(x)
    d2 = np.diff(x, n=2)
    return {
        "mean": mean,
        "std": std,
        "min": float(np.min(x)),
        "max": float(np.max(x)),
        "skewness": skewness,
        "kurtosis": kurtosis,
        "p95": float(np.percentile(x, 95)),
        "mean_abs_diff1": float(np.mean(np.abs(d1))) if d1.size else 0.0,
        "mean_abs_diff2": float(np.mean(np.abs(d2))) if d2.size else 0.0,
    }


@dataclass(frozen=True)
class ZScoreModel:
    """Column-wise standardization state; zero-variance columns get std 1."""

    mean: np.ndarray
    std: np.ndarray
    zero_variance: np.ndarray


def zscore_fit(X) -> ZScoreModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("expected a non-empty 2-D matrix")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    zero = std == 0.0
    std = np.where(zero, 1.0, std)
    return ZScoreModel(mean=mean, std=std, zero_variance=zero)


def zscore_apply(m: ZScoreModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != m.mean.shape[0]:
        raise ValueError("dimension mismatch with fitted normalizer")
    return (X - m.mean) / m.std
