"""EEG features: conditional-entropy pairs plus topographic embeddings."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from . import dsp
from .data import FeatureVector, SignalBlock, concat_features
from .embedding import EmbeddingProvider

N_CHANNELS = 14
ENTROPY_BINS = 16
BANDS = (("theta", 4.0, 7.0), ("alpha", 7.0, 13.0), ("beta", 13.0, 30.0))
EMBED_PCA_K = 32

RASTER_SIZE = 224
HEAD_CENTER_PX = 112.0
HEAD_RADIUS_PX = 105.0
IDW_POWER = 2

N_ENTROPY_FEATURES = N_CHANNELS * (N_CHANNELS - 1) // 2            # 91
N_EMBED_FEATURES = EMBED_PCA_K * len(BANDS)                        # 96


@dataclass(frozen=True)
class ElectrodeLayout:
    """Cap geometry: names plus unit-disk (x, y) positions, x right, y front."""

    names: tuple[str, ...]
    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        names = tuple(self.names)
        if len(names) != N_CHANNELS or pos.shape != (N_CHANNELS, 2):
            raise ValueError(f"layout needs {N_CHANNELS} named positions")
        if len(set(names)) != len(names):
            raise ValueError("electrode names must be unique")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if np.any(np.hypot(pos[:, 0], pos[:, 1]) > 1.0 + 1e-12):
            raise ValueError("positions must lie in the unit disk")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "positions", pos)


# 10-20 positions of the 14-electrode cap: spherical angles on the standard
# percentage grid, projected to the plane toward a point 3 radii below the
# vertex; left/right pairs are exact mirrors
DEFAULT_LAYOUT = ElectrodeLayout(
    names=("AF3", "F7", "F3", "FC5", "T7", "P7", "O1",
           "O2", "P8", "T8", "FC6", "F4", "F8", "AF4"),
    positions=np.array([
        (-0.298221, 0.698326),   # AF3
        (-0.710235, 0.542571),   # F7
        (-0.390363, 0.482515),   # F3
        (-0.648567, 0.260480),   # FC5
        (-0.862241, 0.000000),   # T7
        (-0.710235, -0.542571),  # P7
        (-0.284826, -0.921718),  # O1
        (0.284826, -0.921718),   # O2
        (0.710235, -0.542571),   # P8
        (0.862241, 0.000000),    # T8
        (0.648567, 0.260480),    # FC6
        (0.390363, 0.482515),    # F4
        (0.710235, 0.542571),    # F8
        (0.298221, 0.698326),    # AF4
    ]),
)


def load_layout_csv(path: str | Path) -> ElectrodeLayout:
    df = pd.read_csv(path)
    if list(df.columns) != ["name", "x", "y"]:
        raise ValueError(f"{path}: layout CSV needs columns name,x,y")
    return ElectrodeLayout(tuple(str(n) for n in df["name"]),
                           df[["x", "y"]].to_numpy(dtype=np.float64))


@dataclass(frozen=True)
class TopoRaster:
    grid: np.ndarray
    band: str
    in_head: np.ndarray


def _check_eeg(eeg: SignalBlock) -> None:
    if eeg.modality != "EEG":
        raise ValueError("expected an EEG block")
    if eeg.channel_count != N_CHANNELS:
        raise ValueError(f"expected {N_CHANNELS} EEG channels, "
                         f"got {eeg.channel_count}")


def entropy_pair_names(channel_names: Sequence[str]) -> tuple[str, ...]:
    names = []
    for i in range(len(channel_names)):
        for j in range(i + 1, len(channel_names)):
            names.append(f"ce_{channel_names[i]}_{channel_names[j]}")
    return tuple(names)


def eeg_entropy_features(eeg: SignalBlock,
                         channel_names: Optional[Sequence[str]] = None,
                         n_bins: int = ENTROPY_BINS) -> FeatureVector:
    """H(later | earlier) for every channel pair in layout order.

    channel_names defaults to the standard cap for 14-channel blocks and
    ch1..chK otherwise (reduced development harnesses).
    """
    if eeg.modality != "EEG":
        raise ValueError("expected an EEG block")
    k = eeg.channel_count
    if k < 2:
        raise ValueError("need at least 2 channels")
    if channel_names is None:
        channel_names = (DEFAULT_LAYOUT.names if k == N_CHANNELS
                         else tuple(f"ch{i + 1}" for i in range(k)))
    if len(channel_names) != k:
        raise ValueError("one name per channel required")
    values = []
    for i in range(k):
        for j in range(i + 1, k):
            values.append(dsp.conditional_entropy(
                eeg.samples[j], eeg.samples[i], n_bins))
    return FeatureVector(entropy_pair_names(channel_names),
                         np.array(values))


def eeg_band_powers(eeg: SignalBlock, window_s: float = 1.0,
                    hop_s: float = 0.5) -> np.ndarray:
    """Per-channel theta/alpha/beta power, shape [channels x 3]."""
    _check_eeg(eeg)
    out = np.empty((eeg.channel_count, len(BANDS)))
    for ch in range(eeg.channel_count):
        psd = dsp.welch_psd(eeg.samples[ch], eeg.sample_rate_hz,
                            window_s, hop_s)
        for b, (_, lo, hi) in enumerate(BANDS):
            out[ch, b] = dsp.band_power(psd, lo, hi)
    return out


# IDW weights depend only on the layout, so they are shared across trials
_weights_cache: dict[bytes, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _idw_weights(layout: ElectrodeLayout):
    key = layout.positions.tobytes()
    hit = _weights_cache.get(key)
    if hit is not None:
        return hit
    rows, cols = np.mgrid[0:RASTER_SIZE, 0:RASTER_SIZE]
    in_head = ((rows - HEAD_CENTER_PX) ** 2 + (cols - HEAD_CENTER_PX) ** 2
               <= HEAD_RADIUS_PX ** 2)
    pr = rows[in_head].astype(np.float64)
    pc = cols[in_head].astype(np.float64)
    # raster position of each electrode: x grows right, y grows up
    ecol = HEAD_CENTER_PX + HEAD_RADIUS_PX * layout.positions[:, 0]
    erow = HEAD_CENTER_PX - HEAD_RADIUS_PX * layout.positions[:, 1]
    d2 = (pr[:, None] - erow[None, :]) ** 2 + (pc[:, None] - ecol[None, :]) ** 2
    exact = d2 == 0.0
    d2_safe = np.where(exact, 1.0, d2)
    w = 1.0 / d2_safe ** (IDW_POWER / 2)
    on_electrode = exact.any(axis=1)
    w[on_electrode] = exact[on_electrode]  # pixel on an electrode: its value
    w /= w.sum(axis=1, keepdims=True)
    result = (w, in_head, on_electrode)
    _weights_cache[key] = result
    return result


def render_topomap(band_values, layout: ElectrodeLayout = DEFAULT_LAYOUT,
                   band: str = "") -> TopoRaster:
    values = np.asarray(band_values, dtype=np.float64).ravel()
    if values.size != len(layout.names):
        raise ValueError(f"need {len(layout.names)} values, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise ValueError("band values must be finite")
    w, in_head, _ = _idw_weights(layout)
    if values.max() == values.min():
        # constant input: interpolation is constant too, but rounding noise
        # in the weighted sums would blow up under min-max scaling
        field = np.full(int(in_head.sum()), 0.5)
    else:
        field = w @ values
        lo, hi = field.min(), field.max()
        if hi > lo:
            field = (field - lo) / (hi - lo)
        else:
            field = np.full_like(field, 0.5)
    grid = np.zeros((RASTER_SIZE, RASTER_SIZE))
    grid[in_head] = field
    return TopoRaster(grid=grid, band=band, in_head=in_head)


def embed_topomap(r: TopoRaster, embedder: EmbeddingProvider,
                  key: str = "") -> np.ndarray:
    vec = embedder.embed(r.grid, key=key)
    vec = np.asarray(vec, dtype=np.float64).ravel()
    if vec.size != 4096:
        raise ValueError(f"embedder returned {vec.size} values, "
                         f"expected 4096")
    return vec


def embedding_feature_names() -> tuple[str, ...]:
    return tuple(f"emb_{band}_pc{i + 1}"
                 for band, _, _ in BANDS for i in range(EMBED_PCA_K))


def trial_band_embeddings(eeg: SignalBlock, layout: ElectrodeLayout,
                          embedder: EmbeddingProvider,
                          key_prefix: str = "") -> dict[str, np.ndarray]:
    """Raw 4096-value embedding per band; the PCA training input."""
    powers = eeg_band_powers(eeg)
    out = {}
    for b, (band, _, _) in enumerate(BANDS):
        raster = render_topomap(powers[:, b], layout, band=band)
        key = f"{key_prefix}_{band}" if key_prefix else band
        out[band] = embed_topomap(raster, embedder, key=key)
    return out


def eeg_embedding_features(eeg: SignalBlock, layout: ElectrodeLayout,
                           embedder: EmbeddingProvider,
                           pca_by_band: Mapping[str, dsp.PcaModel],
                           key_prefix: str = "") -> FeatureVector:
    """32 PCA coordinates per band raster, ordered theta, alpha, beta."""
    for band, _, _ in BANDS:
        model = pca_by_band.get(band)
        if model is None:
            raise ValueError(f"no fitted PCA model for band {band!r}")
        if model.k != EMBED_PCA_K:
            raise ValueError(f"band {band!r} PCA has k={model.k}, "
                             f"expected {EMBED_PCA_K}")
    embeddings = trial_band_embeddings(eeg, layout, embedder, key_prefix)
    parts = []
    for band, _, _ in BANDS:
        z = dsp.pca_transform(pca_by_band[band], embeddings[band][None, :])
        parts.append(z[0])
    return FeatureVector(embedding_feature_names(), np.concatenate(parts))


def eeg_features(eeg: SignalBlock, layout: ElectrodeLayout,
                 embedder: EmbeddingProvider,
                 pca_by_band: Mapping[str, dsp.PcaModel],
                 key_prefix: str = "") -> FeatureVector:
    """[91 entropy | 96 embedding] = 187 values."""
    return concat_features([
        eeg_entropy_features(eeg),
        eeg_embedding_features(eeg, layout, embedder, pca_by_band,
                               key_prefix),
    ])
