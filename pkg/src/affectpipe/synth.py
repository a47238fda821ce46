"""Synthetic dataset generator with planted, recoverable class signal.

Each trial draws a latent level per rating scale (above or below the
neutral 5). The level determines the post-stimulus rating, and the
pre-stimulus rating is drawn near neutral so that baseline compensation
recovers the level. The same level modulates the signal recipes:

  valence  -> posterior/frontal alpha amplitude split, GSR bump count,
              mouth width, embedding dims 0-9
  arousal  -> beta amplitude, RR-interval jitter, brow raise,
              embedding dims 10-19
  liking   -> frontal theta amplitude

Effect strengths come from LabelPlan; LabelPlan.null() removes every
signal-label dependence while keeping the rating distributions, giving a
random-label control set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .data import Dataset, EmbeddingFrame, LandmarkFrame, Ratings, \
    SignalBlock, TrialRecord

EEG_RATE_HZ = 64.0
ECG_RATE_HZ = 64.0
GSR_RATE_HZ = 32.0
DURATION_S = 52.0
FRAME_PERIOD_S = 1.0

MODALITY_CHOICES = ("eeg", "ecg", "gsr", "landmarks", "embeddings")

# channel order matches the default electrode layout
_POSTERIOR = (4, 5, 6, 7, 8, 9)     # T7 P7 O1 O2 P8 T8
_FRONTAL = (0, 1, 2, 11, 12, 13)    # AF3 F7 F3 F4 F8 AF4

ALPHA_HZ, BETA_HZ, THETA_HZ = 10.0, 20.0, 5.0


@dataclass(frozen=True)
class LabelPlan:
    """Signal-to-label coupling strengths; 1.0 is cleanly separable."""

    valence_effect: float = 1.0
    arousal_effect: float = 1.0
    liking_effect: float = 1.0

    @staticmethod
    def null() -> "LabelPlan":
        return LabelPlan(0.0, 0.0, 0.0)


# 49-point neutral face (x right, y up): 1-5/6-10 brows, 11-14 nose
# ridge, 15-19 nostril line, 20-25/26-31 eyes, 32-43 outer lip, 44-49
# inner lip. The bounding box is set by the brow ends and the chin-side
# lip point, so planted mouth/brow shifts stay inside it horizontally.
_BASE_FACE = np.array([
    (15, 72), (22, 74), (29, 75), (36, 74), (44, 72),
    (56, 72), (64, 74), (71, 75), (78, 74), (85, 72),
    (50, 66), (50, 59), (50, 52), (50, 45),
    (43, 41), (46.5, 40), (50, 39), (53.5, 40), (57, 41),
    (22, 62), (29, 65), (34, 65), (39, 62), (29, 59), (34, 59),
    (61, 62), (66, 65), (71, 65), (78, 62), (66, 59), (71, 59),
    (30, 28), (36, 31), (43, 33), (50, 34), (57, 33), (64, 31),
    (70, 28), (64, 25), (57, 23), (50, 22), (43, 23), (36, 25),
    (38, 29), (50, 30), (62, 29), (62, 27), (50, 26), (38, 27),
], dtype=float)


def _bump_train(t: np.ndarray, centers: np.ndarray, heights: np.ndarray,
                width_s: float) -> np.ndarray:
    out = np.zeros_like(t)
    for c, h in zip(centers, heights):
        out += h * np.exp(-0.5 * ((t - c) / width_s) ** 2)
    return out


def _draw_levels(rng: np.random.Generator):
    signs = rng.choice([-1.0, 1.0], size=4)
    gaps = rng.uniform(0.6, 3.4, size=4)
    levels = 5.0 + signs * gaps
    pre = rng.uniform(4.5, 5.5, size=4)
    post = np.clip(levels - (pre - 5.0), 1.0, 9.0)
    return signs, np.round(pre, 2), np.round(post, 2)


def _make_eeg(rng, s_v, s_a, s_l) -> SignalBlock:
    n = int(round(DURATION_S * EEG_RATE_HZ))
    t = np.arange(n) / EEG_RATE_HZ
    alpha = np.full(14, 2.0)
    alpha[list(_POSTERIOR)] += 1.2 * s_v
    alpha[list(_FRONTAL)] -= 1.2 * s_v
    beta = np.full(14, 1.0 + 0.6 * s_a)
    theta = np.ones(14)
    theta[list(_FRONTAL)] += 0.6 * s_l
    shared = 0.8 * rng.standard_normal(n)
    rows = np.empty((14, n))
    for ch in range(14):
        ph = rng.uniform(0, 2 * np.pi, size=3)
        rows[ch] = (
            rng.standard_normal(n) + shared
            + alpha[ch] * np.sin(2 * np.pi * ALPHA_HZ * t + ph[0])
            + beta[ch] * np.sin(2 * np.pi * BETA_HZ * t + ph[1])
            + theta[ch] * np.sin(2 * np.pi * THETA_HZ * t + ph[2]))
    return SignalBlock("EEG", EEG_RATE_HZ, np.round(rows, 5))


def _make_ecg(rng, s_a) -> SignalBlock:
    n = int(round(DURATION_S * ECG_RATE_HZ))
    t = np.arange(n) / ECG_RATE_HZ
    # alternating-sign RR jitter: ~130 ms successive differences when
    # arousal is high, ~10 ms when low
    amp = 0.035 + 0.030 * s_a
    beats = [0.4 + 0.05 * rng.random()]
    k = 0
    while True:
        rr = 0.8 + amp * (1 if k % 2 == 0 else -1) * (1 + 0.15 * rng.random())
        nxt = beats[-1] + rr + 0.004 * rng.standard_normal()
        if nxt > DURATION_S - 0.5:
            break
        beats.append(nxt)
        k += 1
    beats = np.asarray(beats)
    rows = np.empty((2, n))
    for ch in range(2):
        # R bumps must stay well above the T bumps after the 0.25 s
        # cleaning average, so they are drawn wide enough to survive it
        r_h = (1.0 if ch == 0 else 0.9) + 0.05 * rng.random(beats.size)
        x = _bump_train(t, beats, r_h, 0.06)
        x += _bump_train(t, beats + 0.28, 0.35 * np.ones(beats.size), 0.06)
        rows[ch] = x + 0.02 * rng.standard_normal(n)
    return SignalBlock("ECG", ECG_RATE_HZ, np.round(rows, 5))


def _make_gsr(rng, s_v) -> SignalBlock:
    n = int(round(DURATION_S * GSR_RATE_HZ))
    t = np.arange(n) / GSR_RATE_HZ
    n_bumps = max(2, int(round(7 + 3 * s_v)) + int(rng.integers(-1, 2)))
    slots = np.linspace(4.0, 48.0, n_bumps)
    centers = slots + rng.uniform(-0.8, 0.8, size=n_bumps)
    heights = 1.0 + rng.uniform(0.0, 0.3, size=n_bumps)
    x = 0.3 + 0.04 * np.sin(2 * np.pi * t / 26.0 + rng.uniform(0, 2 * np.pi))
    x = x + _bump_train(t, centers, heights, 0.7)
    x = x + 0.01 * rng.standard_normal(n)
    return SignalBlock("GSR", GSR_RATE_HZ, np.round(x, 5)[None, :])


def _make_landmarks(rng, s_v, s_a) -> list[LandmarkFrame]:
    frames = []
    for i in range(int(DURATION_S / FRAME_PERIOD_S)):
        t_s = (i + 0.5) * FRAME_PERIOD_S
        pts = _BASE_FACE.copy()
        pts[31, 0] -= 3.0 * s_v   # landmark 32: left mouth corner
        pts[37, 0] += 3.0 * s_v   # landmark 38: right mouth corner
        pts[:10, 1] += 2.0 * s_a  # both brows raised with arousal
        pts += rng.normal(0.0, 0.15, size=pts.shape)
        scale = 1.0 + 0.03 * np.sin(2 * np.pi * t_s / 13.0)
        shift = np.array([5.0 * np.sin(2 * np.pi * t_s / 17.0),
                          3.0 * np.cos(2 * np.pi * t_s / 19.0)])
        frames.append(LandmarkFrame(t_s, np.round(pts * scale + shift, 5)))
    return frames


def _make_embeddings(rng, s_v, s_a) -> list[EmbeddingFrame]:
    frames = []
    for i in range(int(DURATION_S / FRAME_PERIOD_S)):
        v = rng.standard_normal(4096)
        v[0:10] += 1.5 * s_v
        v[10:20] += 1.5 * s_a
        frames.append(EmbeddingFrame((i + 0.5) * FRAME_PERIOD_S,
                                     np.round(v, 5)))
    return frames


def generate_synthetic_dataset(n_subjects: int, n_videos: int, seed: int,
                               label_plan: LabelPlan = LabelPlan(),
                               modalities: Optional[Iterable[str]] = None,
                               ) -> Dataset:
    """Deterministic planted-signal dataset of n_subjects x n_videos trials.

    modalities selects a subset of MODALITY_CHOICES (default: all).
    Label draws use a per-trial stream separate from the per-modality
    streams, so the same (seed, trial) gets the same ratings regardless
    of which modalities are generated.
    """
    if n_subjects < 1 or n_videos < 1:
        raise ValueError("n_subjects and n_videos must be >= 1")
    wanted = set(MODALITY_CHOICES if modalities is None else modalities)
    unknown = wanted - set(MODALITY_CHOICES)
    if unknown:
        raise ValueError(f"unknown modalities: {sorted(unknown)}; "
                         f"choose from {MODALITY_CHOICES}")

    root = np.random.SeedSequence(seed)
    trial_seqs = root.spawn(n_subjects * n_videos)
    trials = []
    for idx, tseq in enumerate(trial_seqs):
        si, vi = divmod(idx, n_videos)
        streams = tseq.spawn(6)
        label_rng = np.random.default_rng(streams[0])
        signs, pre, post = _draw_levels(label_rng)
        s_v = signs[0] * label_plan.valence_effect
        s_a = signs[1] * label_plan.arousal_effect
        s_l = signs[2] * label_plan.liking_effect

        trials.append(TrialRecord(
            subject_id=f"s{si + 1:02d}",
            video_id=f"v{vi + 1:02d}",
            duration_s=DURATION_S,
            ratings_pre=Ratings(*pre),
            ratings_post=Ratings(*post),
            eeg=_make_eeg(np.random.default_rng(streams[1]), s_v, s_a, s_l)
            if "eeg" in wanted else None,
            ecg=_make_ecg(np.random.default_rng(streams[2]), s_a)
            if "ecg" in wanted else None,
            gsr=_make_gsr(np.random.default_rng(streams[3]), s_v)
            if "gsr" in wanted else None,
            landmarks=_make_landmarks(np.random.default_rng(streams[4]),
                                      s_v, s_a)
            if "landmarks" in wanted else None,
            face_embeddings=_make_embeddings(np.random.default_rng(
                streams[5]), s_v, s_a)
            if "embeddings" in wanted else None,
        ))
    return Dataset(trials=trials)
