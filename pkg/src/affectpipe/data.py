"""Domain types, trial-manifest ingestion, and validation.

A dataset on disk is a JSON manifest plus one CSV per signal/landmark/
embedding stream.  File paths in the manifest are resolved relative to the
manifest's directory.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

EXPECTED_CHANNELS = {"EEG": 14, "ECG": 2, "GSR": 1}
N_LANDMARKS = 49
EMBEDDING_DIM = 4096
RATING_FIELDS = ("valence", "arousal", "liking", "dominance")
RATING_MIN, RATING_MAX = 1.0, 9.0
DURATION_RANGE_S = (51.0, 150.0)
DURATION_TOLERANCE_S = 2.0

_MODALITY_KEYS = (("eeg_csv", "EEG"), ("ecg_csv", "ECG"), ("gsr_csv", "GSR"))


class DataError(Exception):
    """A dataset or manifest that cannot be loaded at all."""


@dataclass(frozen=True)
class SignalBlock:
    """Fixed-rate multichannel time series, one row per channel."""

    modality: str
    sample_rate_hz: float
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ValueError("samples must be a [channels x n_samples] "
                             "matrix with at least one sample")
        if self.modality not in EXPECTED_CHANNELS:
            raise ValueError(f"unknown modality {self.modality!r}")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        object.__setattr__(self, "samples", arr)

    @property
    def channel_count(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.samples.shape[1] / self.sample_rate_hz


@dataclass(frozen=True)
class LandmarkFrame:
    """One face-landmark observation: (x, y) points at time t_s.

    A frame should carry exactly 49 points; other counts are representable
    so that validation can report them as findings.
    """

    t_s: float
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError(f"points must be an [n x 2] matrix, "
                             f"got shape {pts.shape}")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class EmbeddingFrame:
    """One per-second face-embedding vector (4096 values when valid)."""

    t_s: float
    vector: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.float64).ravel()
        if vec.size < 1:
            raise ValueError("vector must not be empty")
        object.__setattr__(self, "vector", vec)


@dataclass(frozen=True)
class Ratings:
    """Self-report scores on the 1..9 scale.

    Out-of-range values are representable so that validation can report
    them as findings instead of failing construction.
    """

    valence: float
    arousal: float
    liking: float
    dominance: float

    def as_dict(self) -> dict[str, float]:
        return {f: float(getattr(self, f)) for f in RATING_FIELDS}


@dataclass(frozen=True)
class TrialRecord:
    """One subject x video trial with whatever modalities were recorded."""

    subject_id: str
    video_id: str
    duration_s: float
    ratings_pre: Ratings
    ratings_post: Ratings
    eeg: Optional[SignalBlock] = None
    ecg: Optional[SignalBlock] = None
    gsr: Optional[SignalBlock] = None
    landmarks: Optional[list[LandmarkFrame]] = None
    face_embeddings: Optional[list[EmbeddingFrame]] = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.subject_id, self.video_id)

    def signal(self, modality: str) -> Optional[SignalBlock]:
        return {"EEG": self.eeg, "ECG": self.ecg, "GSR": self.gsr}[modality]


@dataclass(frozen=True)
class Dataset:
    trials: list[TrialRecord]
    manifest_path: str = ""

    def __len__(self) -> int:
        return len(self.trials)


@dataclass(frozen=True)
class FeatureVector:
    """Named, ordered real-valued features for one trial."""

    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        names = tuple(self.names)
        if len(names) != vals.size:
            raise ValueError(f"{len(names)} names for {vals.size} values")
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        if not np.all(np.isfinite(vals)):
            raise ValueError("feature values must be finite")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size


def concat_features(parts: Sequence[FeatureVector]) -> FeatureVector:
    names: list[str] = []
    values: list[np.ndarray] = []
    for p in parts:
        names.extend(p.names)
        values.append(p.values)
    return FeatureVector(tuple(names), np.concatenate(values))


def validate_trial(t: TrialRecord) -> list[str]:
    """Check every type invariant; return findings instead of raising."""
    findings: list[str] = []
    any_signal = False
    for modality in ("EEG", "ECG", "GSR"):
        block = t.signal(modality)
        if block is None:
            continue
        any_signal = True
        expected = EXPECTED_CHANNELS[modality]
        if block.channel_count != expected:
            findings.append(
                f"channel_count mismatch: {modality} has "
                f"{block.channel_count}, expected {expected}")
        if not np.all(np.isfinite(block.samples)):
            findings.append(f"{modality} contains non-finite samples")
        if abs(block.duration_s - t.duration_s) > DURATION_TOLERANCE_S:
            findings.append(
                f"{modality} duration {block.duration_s:.2f}s differs from "
                f"trial duration {t.duration_s:.2f}s by more than "
                f"{DURATION_TOLERANCE_S:g}s")
    if t.landmarks is not None:
        for frame in t.landmarks:
            if frame.points.shape[0] != N_LANDMARKS:
                findings.append(f"landmark count: frame at t={frame.t_s} has "
                                f"{frame.points.shape[0]} points")
            if not np.all(np.isfinite(frame.points)):
                findings.append(f"landmark frame at t={frame.t_s} has "
                                f"non-finite coordinates")
        times = [f.t_s for f in t.landmarks]
        if any(b <= a for a, b in zip(times, times[1:])):
            findings.append("landmark frames not strictly sorted by t_s")
    if t.face_embeddings is not None:
        for frame in t.face_embeddings:
            if frame.vector.size != EMBEDDING_DIM:
                findings.append(f"embedding length: frame at t={frame.t_s} "
                                f"has {frame.vector.size} values")
            if not np.all(np.isfinite(frame.vector)):
                findings.append(f"embedding frame at t={frame.t_s} has "
                                f"non-finite values")
        times = [f.t_s for f in t.face_embeddings]
        if any(b <= a for a, b in zip(times, times[1:])):
            findings.append("embedding frames not strictly sorted by t_s")
    for when, ratings in (("pre", t.ratings_pre), ("post", t.ratings_post)):
        for field, value in ratings.as_dict().items():
            if not (RATING_MIN <= value <= RATING_MAX):
                findings.append(f"rating out of range: {field}_{when}={value:g}")
    has_face = bool(t.landmarks) or bool(t.face_embeddings)
    if not any_signal and not has_face:
        findings.append("no modality present")
    if any_signal and not (DURATION_RANGE_S[0] <= t.duration_s
                           <= DURATION_RANGE_S[1]):
        findings.append(f"duration_s {t.duration_s:g} outside "
                        f"[{DURATION_RANGE_S[0]:g}, {DURATION_RANGE_S[1]:g}]")
    return findings


# --- CSV formats -----------------------------------------------------------

def _write_signal_csv(path: Path, block: SignalBlock) -> None:
    with open(path, "w") as fh:
        fh.write(f"# rate_hz={block.sample_rate_hz:g}\n")
        cols = [f"ch{i + 1}" for i in range(block.channel_count)]
        pd.DataFrame(block.samples.T, columns=cols).to_csv(
            fh, index=False, float_format=str)


def _read_signal_csv(path: Path, modality: str) -> SignalBlock:
    with open(path) as fh:
        first = fh.readline()
        m = re.match(r"#\s*rate_hz\s*=\s*([0-9.eE+-]+)\s*$", first)
        if not m:
            raise ValueError(f"{path}: missing '# rate_hz=' header line")
        rate = float(m.group(1))
        df = pd.read_csv(fh, float_precision="round_trip")
    expected = [f"ch{i + 1}" for i in range(len(df.columns))]
    if list(df.columns) != expected:
        raise ValueError(f"{path}: columns must be ch1..chK")
    samples = np.ascontiguousarray(df.to_numpy(dtype=np.float64).T)
    return SignalBlock(modality=modality, sample_rate_hz=rate,
                       samples=samples)


def _write_landmarks_csv(path: Path, frames: list[LandmarkFrame]) -> None:
    cols = ["t_s"]
    for i in range(N_LANDMARKS):
        cols += [f"x{i + 1}", f"y{i + 1}"]
    rows = [np.concatenate([[f.t_s], f.points.ravel()]) for f in frames]
    pd.DataFrame(rows, columns=cols).to_csv(path, index=False,
                                            float_format=str)


def _read_landmarks_csv(path: Path) -> list[LandmarkFrame]:
    df = pd.read_csv(path, float_precision="round_trip")
    if df.shape[1] != 1 + 2 * N_LANDMARKS or df.columns[0] != "t_s":
        raise ValueError(f"{path}: expected t_s plus {N_LANDMARKS} "
                         f"(x, y) columns")
    arr = df.to_numpy(dtype=np.float64)
    return [LandmarkFrame(t_s=row[0], points=row[1:].reshape(N_LANDMARKS, 2))
            for row in arr]


def _write_embeddings_csv(path: Path, frames: list[EmbeddingFrame]) -> None:
    cols = ["t_s"] + [f"e{i + 1}" for i in range(EMBEDDING_DIM)]
    rows = [np.concatenate([[f.t_s], f.vector]) for f in frames]
    pd.DataFrame(rows, columns=cols).to_csv(path, index=False,
                                            float_format=str)


def _read_embeddings_csv(path: Path) -> list[EmbeddingFrame]:
    df = pd.read_csv(path, float_precision="round_trip")
    if df.shape[1] != 1 + EMBEDDING_DIM or df.columns[0] != "t_s":
        raise ValueError(f"{path}: expected t_s plus {EMBEDDING_DIM} columns")
    arr = df.to_numpy(dtype=np.float64)
    return [EmbeddingFrame(t_s=row[0], vector=row[1:]) for row in arr]


# --- Manifest load / save --------------------------------------------------

def _parse_ratings(raw: object, which: str) -> Ratings:
    if not isinstance(raw, dict):
        raise ValueError(f"{which} must be an object")
    vals = {}
    for field in RATING_FIELDS:
        if field not in raw:
            raise ValueError(f"{which} missing field {field!r}")
        vals[field] = float(raw[field])
        if not np.isfinite(vals[field]):
            raise ValueError(f"{which}.{field} is not finite")
    return Ratings(**vals)


def _load_signal(entry: dict, key: str, modality: str, base: Path,
                 duration_s: float, trial_tag: str) -> Optional[SignalBlock]:
    if key not in entry:
        return None
    path = base / str(entry[key])
    if not path.exists():
        log.warning("%s: %s file missing (%s), modality omitted",
                    trial_tag, modality, path)
        return None
    try:
        block = _read_signal_csv(path, modality)
    except (ValueError, OSError, pd.errors.ParserError) as exc:
        log.warning("%s: unparseable %s file (%s), modality omitted",
                    trial_tag, modality, exc)
        return None
    if block.channel_count != EXPECTED_CHANNELS[modality]:
        log.warning("%s: %s has %d channels, expected %d, modality omitted",
                    trial_tag, modality, block.channel_count,
                    EXPECTED_CHANNELS[modality])
        return None
    if not np.all(np.isfinite(block.samples)):
        log.warning("%s: %s contains non-finite samples, modality omitted",
                    trial_tag, modality)
        return None
    # longer than the declared duration: truncate; shorter is kept as-is
    # unless the shortfall exceeds the tolerance
    n_keep = int(round(duration_s * block.sample_rate_hz))
    if block.n_samples > n_keep:
        block = SignalBlock(modality, block.sample_rate_hz,
                            block.samples[:, :n_keep])
    elif duration_s - block.duration_s > DURATION_TOLERANCE_S:
        log.warning("%s: %s is %.2fs for a %.2fs trial, modality omitted",
                    trial_tag, modality, block.duration_s, duration_s)
        return None
    return block


def _load_frames(entry: dict, key: str, base: Path, reader, what: str,
                 trial_tag: str):
    if key not in entry:
        return None
    path = base / str(entry[key])
    if not path.exists():
        log.warning("%s: %s file missing (%s), modality omitted",
                    trial_tag, what, path)
        return None
    try:
        frames = reader(path)
    except (ValueError, OSError, pd.errors.ParserError) as exc:
        log.warning("%s: unparseable %s file (%s), modality omitted",
                    trial_tag, what, exc)
        return None
    times = [f.t_s for f in frames]
    if any(b <= a for a, b in zip(times, times[1:])):
        log.warning("%s: %s frames not strictly sorted by t_s, modality "
                    "omitted", trial_tag, what)
        return None
    if not frames:
        return None
    return frames


def load_manifest(path: str | Path) -> Dataset:
    """Load a dataset, omitting broken modalities and rejecting bad trials.

    Raises DataError when the manifest itself is unusable; per-trial and
    per-modality problems are logged and the offending piece is dropped.
    """
    path = Path(path)
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("trials"), list):
        raise DataError(f"manifest {path} must be an object with a "
                        f"'trials' list")
    base = path.parent
    trials: list[TrialRecord] = []
    seen: set[tuple[str, str]] = set()
    for i, entry in enumerate(raw["trials"]):
        if not isinstance(entry, dict):
            raise DataError(f"manifest trial #{i} is not an object")
        try:
            subject = str(entry["subject_id"])
            video = str(entry["video_id"])
            duration_s = float(entry["duration_s"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"manifest trial #{i} malformed: {exc}") from exc
        tag = f"trial {subject}/{video}"
        if (subject, video) in seen:
            raise DataError(f"duplicate trial {subject}/{video} in manifest")
        seen.add((subject, video))
        try:
            pre = _parse_ratings(entry.get("ratings_pre"), "ratings_pre")
            post = _parse_ratings(entry.get("ratings_post"), "ratings_post")
        except (ValueError, TypeError) as exc:
            log.warning("%s rejected: %s", tag, exc)
            continue
        trial = TrialRecord(
            subject_id=subject, video_id=video, duration_s=duration_s,
            ratings_pre=pre, ratings_post=post,
            eeg=_load_signal(entry, "eeg_csv", "EEG", base, duration_s, tag),
            ecg=_load_signal(entry, "ecg_csv", "ECG", base, duration_s, tag),
            gsr=_load_signal(entry, "gsr_csv", "GSR", base, duration_s, tag),
            landmarks=_load_frames(entry, "landmarks_csv", base,
                                   _read_landmarks_csv, "landmark", tag),
            face_embeddings=_load_frames(entry, "embeddings_csv", base,
                                         _read_embeddings_csv, "embedding",
                                         tag),
        )
        findings = validate_trial(trial)
        if findings:
            log.warning("%s rejected: %s", tag, "; ".join(findings))
            continue
        trials.append(trial)
    return Dataset(trials=trials, manifest_path=str(path))


def _file_stem(trial: TrialRecord) -> str:
    raw = f"{trial.subject_id}_{trial.video_id}"
    return re.sub(r"[^A-Za-z0-9_.-]", "_", raw)


def save_dataset(dataset: Dataset, out_dir: str | Path) -> Path:
    """Write every trial's files plus manifest.json under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for trial in dataset.trials:
        stem = _file_stem(trial)
        entry: dict[str, object] = {
            "subject_id": trial.subject_id,
            "video_id": trial.video_id,
            "duration_s": trial.duration_s,
            "ratings_pre": trial.ratings_pre.as_dict(),
            "ratings_post": trial.ratings_post.as_dict(),
        }
        for key, modality in _MODALITY_KEYS:
            block = trial.signal(modality)
            if block is not None:
                name = f"{stem}_{modality.lower()}.csv"
                _write_signal_csv(out_dir / name, block)
                entry[key] = name
        if trial.landmarks:
            name = f"{stem}_landmarks.csv"
            _write_landmarks_csv(out_dir / name, trial.landmarks)
            entry["landmarks_csv"] = name
        if trial.face_embeddings:
            name = f"{stem}_embeddings.csv"
            _write_embeddings_csv(out_dir / name, trial.face_embeddings)
            entry["embeddings_csv"] = name
        entries.append(entry)
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump({"trials": entries}, fh, indent=1)
        fh.write("\n")
    return manifest_path
