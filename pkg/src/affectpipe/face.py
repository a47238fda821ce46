"""Geometric action-unit features and aggregated-embedding features.

Landmark indices are 1-based and follow the 49-point convention used
throughout this project: 1-5 left brow, 6-10 right brow, 11-14 nose
ridge (top to tip), 15-19 nostril line, 20-25 left eye (20 outer corner,
21-22 upper lid, 23 inner corner, 24-25 lower lid), 26-31 right eye
(26 inner corner, 27-28 upper lid, 29 outer corner, 30-31 lower lid),
32-43 outer lip (32 left corner, 35 top center, 38 right corner, 41
bottom center), 44-49 inner lip (45 top center, 48 bottom center).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from . import dsp
from .data import EMBEDDING_DIM, N_LANDMARKS, EmbeddingFrame, FeatureVector, \
    LandmarkFrame

N_AU_FEATURES = 30
FACE_PCA_K = 50
WIDTH, HEIGHT = "width", "height"


@dataclass(frozen=True)
class AuFeatureConfig:
    """30 landmark pairs, each normalized by face width or height."""

    pairs: tuple[tuple[int, int, str], ...]

    def __post_init__(self):
        pairs = tuple((int(a), int(b), str(norm))
                      for a, b, norm in self.pairs)
        if len(pairs) != N_AU_FEATURES:
            raise ValueError(f"need exactly {N_AU_FEATURES} pairs, "
                             f"got {len(pairs)}")
        for a, b, norm in pairs:
            if not (1 <= a <= N_LANDMARKS and 1 <= b <= N_LANDMARKS):
                raise ValueError(f"pair ({a}, {b}) out of 1..{N_LANDMARKS}")
            if a == b:
                raise ValueError(f"pair ({a}, {b}) must use two points")
            if norm not in (WIDTH, HEIGHT):
                raise ValueError(f"normalizer must be width or height, "
                                 f"got {norm!r}")
        object.__setattr__(self, "pairs", pairs)


DEFAULT_AU_CONFIG = AuFeatureConfig(pairs=(
    (3, 21, HEIGHT),    # left brow center to upper lid (brow raise L)
    (8, 28, HEIGHT),    # right brow center to upper lid (brow raise R)
    (1, 20, HEIGHT),    # left brow outer end to eye outer corner
    (10, 29, HEIGHT),   # right brow outer end to eye outer corner
    (5, 23, HEIGHT),    # left brow inner end to eye inner corner
    (6, 26, HEIGHT),    # right brow inner end to eye inner corner
    (5, 6, WIDTH),      # inter-brow gap
    (21, 24, HEIGHT),   # left eye openness
    (28, 30, HEIGHT),   # right eye openness
    (20, 23, WIDTH),    # left eye width
    (26, 29, WIDTH),    # right eye width
    (32, 38, WIDTH),    # mouth width
    (35, 41, HEIGHT),   # outer lip vertical gap
    (45, 48, HEIGHT),   # inner lip gap (mouth openness)
    (32, 20, HEIGHT),   # mouth corner to eye corner L (smile lift)
    (38, 29, HEIGHT),   # mouth corner to eye corner R
    (14, 35, HEIGHT),   # nose tip to upper lip center
    (17, 35, HEIGHT),   # philtrum to upper lip center
    (1, 5, WIDTH),      # left brow length
    (6, 10, WIDTH),     # right brow length
    (11, 14, HEIGHT),   # nose ridge length
    (15, 19, WIDTH),    # nostril line width
    (32, 35, WIDTH),    # upper lip left half
    (35, 38, WIDTH),    # upper lip right half
    (32, 41, WIDTH),    # mouth corner L to lower lip center
    (38, 41, WIDTH),    # mouth corner R to lower lip center
    (23, 26, WIDTH),    # inter-eye gap (inner corners)
    (20, 29, WIDTH),    # outer eye span
    (3, 35, HEIGHT),    # left brow to upper lip (face-height proxy)
    (8, 41, HEIGHT),    # right brow to lower lip
))


def load_au_config_csv(path: str | Path) -> AuFeatureConfig:
    df = pd.read_csv(path)
    needed = ["index_a", "index_b", "normalizer"]
    if list(df.columns[:3]) != needed:
        raise ValueError(f"{path}: AU config needs columns "
                         f"index_a,index_b,normalizer[,comment]")
    return AuFeatureConfig(tuple(
        (int(r.index_a), int(r.index_b), str(r.normalizer))
        for r in df.itertuples()))


def save_au_config_csv(cfg: AuFeatureConfig, path: str | Path) -> None:
    pd.DataFrame(
        [(a, b, n) for a, b, n in cfg.pairs],
        columns=["index_a", "index_b", "normalizer"],
    ).to_csv(path, index=False)


@dataclass(frozen=True)
class FaceBox:
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("face box extents must be positive")


def face_box(frame: LandmarkFrame) -> FaceBox:
    pts = frame.points
    w = float(pts[:, 0].max() - pts[:, 0].min())
    h = float(pts[:, 1].max() - pts[:, 1].min())
    if w <= 0 or h <= 0:
        raise ValueError(f"degenerate landmark bounding box at "
                         f"t={frame.t_s} (w={w:g}, h={h:g})")
    return FaceBox(w, h)


def au_features_frame(frame: LandmarkFrame,
                      cfg: AuFeatureConfig = DEFAULT_AU_CONFIG) -> np.ndarray:
    """30 normalized pair distances for one frame."""
    if frame.points.shape[0] != N_LANDMARKS:
        raise ValueError(f"frame has {frame.points.shape[0]} points, "
                         f"need {N_LANDMARKS}")
    box = face_box(frame)
    pts = frame.points
    out = np.empty(N_AU_FEATURES)
    for i, (a, b, norm) in enumerate(cfg.pairs):
        d = float(np.hypot(*(pts[a - 1] - pts[b - 1])))
        out[i] = d / (box.width if norm == WIDTH else box.height)
    return out


def au_feature_names() -> tuple[str, ...]:
    agg = ("mean", "p95", "std")
    return tuple(f"au{i + 1:02d}_{stat}"
                 for stat in agg for i in range(N_AU_FEATURES))


def au_features_trial(frames: Sequence[LandmarkFrame],
                      cfg: AuFeatureConfig = DEFAULT_AU_CONFIG
                      ) -> FeatureVector:
    """[30 means | 30 p95s | 30 stds] across the trial's frames."""
    if not frames:
        raise ValueError("need at least one landmark frame")
    per_frame = np.array([au_features_frame(f, cfg) for f in frames])
    stats = [dsp.summary_stats(per_frame[:, i]) for i in range(N_AU_FEATURES)]
    values = np.concatenate([
        [s["mean"] for s in stats],
        [s["p95"] for s in stats],
        [s["std"] for s in stats],
    ])
    return FeatureVector(au_feature_names(), values)


def aggregate_embedding_frames(frames: Sequence[EmbeddingFrame]) -> np.ndarray:
    """Per-dimension [mean | p95 | std] over frames: 3 x 4096 = 12288 values.

    Matches summary_stats per dimension (population std, linear p95), done
    with vectorized calls because 4096 per-column passes would be slow.
    """
    if not frames:
        raise ValueError("need at least one embedding frame")
    M = np.array([f.vector for f in frames])
    if M.shape[1] != EMBEDDING_DIM:
        raise ValueError(f"embedding frames must have {EMBEDDING_DIM} values")
    return np.concatenate([M.mean(axis=0),
                           np.percentile(M, 95.0, axis=0),
                           M.std(axis=0)])


def face_embedding_names() -> tuple[str, ...]:
    return tuple(f"face_emb_pc{i + 1}" for i in range(FACE_PCA_K))


def face_embedding_trial(frames: Sequence[EmbeddingFrame],
                         pca: dsp.PcaModel) -> FeatureVector:
    """PCA coordinates (k=50) of the trial's aggregated embedding."""
    if pca.k != FACE_PCA_K:
        raise ValueError(f"face PCA must have k={FACE_PCA_K}, got {pca.k}")
    agg = aggregate_embedding_frames(frames)
    z = dsp.pca_transform(pca, agg[None, :])[0]
    return FeatureVector(face_embedding_names(), z)
