"""Experiment orchestration: split, extract, fuse, train, evaluate, report.

Everything that learns parameters (band-raster PCA, face-embedding PCA,
fusion z-scores, the classifier and its internal normalizer) is fitted
strictly on the training partition; test trials only ever pass through
already-fitted transforms. fit_cell/evaluate_cell keep those two phases
separate so the no-leakage property can be checked by hashing fitted
parameters.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from . import dsp
from .data import DataError, Dataset, RATING_FIELDS, TrialRecord, \
    load_manifest
from .ecg import ecg_features
from .eeg import DEFAULT_LAYOUT, EMBED_PCA_K, BANDS, ElectrodeLayout, \
    eeg_features, trial_band_embeddings
from .elm import DEFAULT_GRID, CvReport, ElmModel, accuracy, \
    cross_validate, elm_predict, elm_train
from .embedding import EmbeddingProvider, get_provider
from .face import DEFAULT_AU_CONFIG, FACE_PCA_K, AuFeatureConfig, \
    aggregate_embedding_frames, au_features_trial, face_embedding_trial, \
    load_au_config_csv
from .gsr import gsr_features
from .labels import make_labels

log = logging.getLogger(__name__)

MODALITIES = ("eeg", "ecg", "gsr", "face_au", "face_embed")
TARGETS = ("valence", "arousal", "liking", "dominance",
           "emotion4", "emotion8")
BASELINE_MODES = ("raw", "compensated")
RESULTS_HEADER = "target,features,baseline_mode,accuracy,chance," \
    "n_train,n_test"

TrialId = tuple  # (subject_id, video_id)


class ConfigError(Exception):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    manifest: str = ""
    split_fraction: float = 0.8
    split_seed: int = 0
    modalities: tuple = MODALITIES
    fusion_groups: tuple = ()
    baseline_mode: str = "compensated"
    targets: tuple = ("valence",)
    elm_grid: Mapping = field(
        default_factory=lambda: {k: tuple(v) for k, v in
                                 DEFAULT_GRID.items()})
    elm_seed: int = 0
    cv_folds: int = 10
    embedder: str = "stub64"
    au_config: str = ""

    def __post_init__(self):
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError("split_fraction must lie in (0, 1)")
        object.__setattr__(self, "modalities",
                           tuple(str(m) for m in self.modalities))
        object.__setattr__(self, "targets",
                           tuple(str(t) for t in self.targets))
        object.__setattr__(self, "fusion_groups",
                           tuple(tuple(str(m) for m in g)
                                 for g in self.fusion_groups))
        bad = set(self.modalities) - set(MODALITIES)
        if bad:
            raise ConfigError(f"unknown modalities: {sorted(bad)}")
        bad = set(self.targets) - set(TARGETS)
        if bad:
            raise ConfigError(f"unknown targets: {sorted(bad)}")
        if not self.targets:
            raise ConfigError("need at least one target")
        for g in self.fusion_groups:
            if len(g) < 2 or not set(g) <= set(MODALITIES):
                raise ConfigError(f"fusion group {g} must combine two or "
                                  f"more known modalities")
        if not self.modalities and not self.fusion_groups:
            raise ConfigError("nothing to run: no modalities or fusions")
        if self.baseline_mode not in BASELINE_MODES + ("both",):
            raise ConfigError(f"baseline_mode must be one of "
                              f"{BASELINE_MODES + ('both',)}")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be >= 2")
        grid = dict(self.elm_grid)
        if not grid.get("L") or not grid.get("ridge_lambda"):
            raise ConfigError("elm_grid needs non-empty L and ridge_lambda")
        object.__setattr__(self, "elm_grid", {
            "L": tuple(int(v) for v in grid["L"]),
            "ridge_lambda": tuple(float(v) for v in grid["ridge_lambda"])})

    @property
    def feature_sets(self) -> tuple[tuple, ...]:
        return tuple((m,) for m in self.modalities) + self.fusion_groups

    @property
    def modes(self) -> tuple[str, ...]:
        if self.baseline_mode == "both":
            return BASELINE_MODES
        return (self.baseline_mode,)


def config_from_dict(raw: Mapping) -> ExperimentConfig:
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return ExperimentConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_dict(raw)


# -- split -------------------------------------------------------------------

def split_dataset(dataset: Dataset, fraction: float,
                  seed: int) -> tuple[list, list]:
    """Trial-level shuffle split: first floor(n*fraction) permuted trials
    train, the rest test."""
    n = len(dataset.trials)
    if n < 2:
        raise DataError("need at least 2 trials to split")
    # guard against 10 * 0.3 = 2.9999... landing below the exact floor
    n_train = int(math.floor(n * fraction + 1e-9))
    if n_train < 1 or n_train >= n:
        raise DataError(f"split {fraction} of {n} trials leaves an empty "
                        f"partition")
    order = np.random.default_rng(seed).permutation(n)
    keys = [dataset.trials[i].key for i in order]
    return keys[:n_train], keys[n_train:]


# -- label derivation --------------------------------------------------------

def trial_label(trial: TrialRecord, target: str, baseline_mode: str) -> str:
    ls = make_labels(trial.ratings_pre, trial.ratings_post,
                     compensate=(baseline_mode == "compensated"))
    if target in RATING_FIELDS:
        return ls.binary[target]
    if target == "emotion4":
        return ls.quadrant4
    if target == "emotion8":
        return ls.octant8
    raise ConfigError(f"unknown target {target!r}")


# -- transforms and per-modality extraction ----------------------------------

@dataclass(frozen=True)
class FittedTransforms:
    """Train-fitted state shared by every cell of an experiment run."""

    layout: ElectrodeLayout
    au_config: AuFeatureConfig
    eeg_pcas: Optional[dict]      # band -> PcaModel, when eeg was fitted
    face_pca: Optional[dsp.PcaModel]


def _trials_by_key(dataset: Dataset) -> dict:
    return {t.key: t for t in dataset.trials}


def _has_modality(trial: TrialRecord, modality: str) -> bool:
    return {
        "eeg": trial.eeg, "ecg": trial.ecg, "gsr": trial.gsr,
        "face_au": trial.landmarks, "face_embed": trial.face_embeddings,
    }[modality] is not None


def fit_transforms(dataset: Dataset, train_ids: Sequence[TrialId],
                   modalities: Sequence[str],
                   provider: EmbeddingProvider,
                   layout: ElectrodeLayout = DEFAULT_LAYOUT,
                   au_config: AuFeatureConfig = DEFAULT_AU_CONFIG,
                   ) -> FittedTransforms:
    """Fit the PCA stages on training trials only."""
    by_key = _trials_by_key(dataset)
    train = [by_key[k] for k in sorted(train_ids)]
    eeg_pcas = None
    if "eeg" in modalities:
        rows = {band: [] for band, _, _ in BANDS}
        for t in train:
            if t.eeg is None:
                continue
            embs = trial_band_embeddings(t.eeg, layout, provider,
                                         key_prefix="_".join(t.key))
            for band, vec in embs.items():
                rows[band].append(vec)
        n = len(next(iter(rows.values())))
        if n < EMBED_PCA_K + 1:
            raise DataError(f"EEG embedding PCA needs more than "
                            f"{EMBED_PCA_K} training trials with EEG, "
                            f"got {n}")
        eeg_pcas = {band: dsp.pca_fit(np.array(v), EMBED_PCA_K)
                    for band, v in rows.items()}
    face_pca = None
    if "face_embed" in modalities:
        rows = [aggregate_embedding_frames(t.face_embeddings)
                for t in train if t.face_embeddings is not None]
        if len(rows) < FACE_PCA_K + 1:
            raise DataError(f"face embedding PCA needs more than "
                            f"{FACE_PCA_K} training trials with "
                            f"embeddings, got {len(rows)}")
        face_pca = dsp.pca_fit(np.array(rows), FACE_PCA_K)
    return FittedTransforms(layout=layout, au_config=au_config,
                            eeg_pcas=eeg_pcas, face_pca=face_pca)


def _trial_features(trial: TrialRecord, modality: str,
                    tf: FittedTransforms, provider: EmbeddingProvider):
    """FeatureVector for one trial, or None when the modality is absent
    or degenerate."""
    if not _has_modality(trial, modality):
        return None
    if modality == "eeg":
        if tf.eeg_pcas is None:
            raise DataError("EEG requested but transforms lack band PCAs")
        return eeg_features(trial.eeg, tf.layout, provider, tf.eeg_pcas,
                            key_prefix="_".join(trial.key))
    if modality == "ecg":
        return ecg_features(trial.ecg)
    if modality == "gsr":
        return gsr_features(trial.gsr)
    if modality == "face_au":
        return au_features_trial(trial.landmarks, tf.au_config)
    if tf.face_pca is None:
        raise DataError("face_embed requested but transforms lack its PCA")
    return face_embedding_trial(trial.face_embeddings, tf.face_pca)


def extract_features(dataset: Dataset, modality: str, tf: FittedTransforms,
                     provider: EmbeddingProvider,
                     ids: Optional[Sequence[TrialId]] = None):
    """Feature matrix over trials that have the modality, id-sorted.

    Returns (matrix, kept ids, feature names). Trials without the
    modality (or with a degenerate signal) are skipped.
    """
    if modality not in MODALITIES:
        raise ConfigError(f"unknown modality {modality!r}")
    by_key = _trials_by_key(dataset)
    wanted = sorted(by_key) if ids is None else sorted(ids)
    rows, kept, names = [], [], None
    for key in wanted:
        fv = _trial_features(by_key[key], modality, tf, provider)
        if fv is None:
            continue
        rows.append(fv.values)
        kept.append(key)
        names = fv.names
    if not rows:
        return np.empty((0, 0)), [], ()
    return np.array(rows), kept, names


def fuse(parts: Sequence[tuple], train_ids: Sequence[TrialId]):
    """Inner-join per-modality matrices and concatenate columns.

    parts: (matrix, ids, names) per group. Each group is z-scored with
    statistics fitted on its training rows so no group dominates the
    concatenation. Returns (matrix, ids, names, per-group ZScoreModels).
    """
    if len(parts) < 2:
        raise ValueError("fusion needs at least 2 feature groups")
    common = set(parts[0][1])
    for _, ids, _ in parts[1:]:
        common &= set(ids)
    if not common:
        raise DataError("fusion found no trials shared by all groups; "
                        "check that the modalities cover the same trials")
    keep = sorted(common)
    train = set(train_ids)
    fit_rows = [k for k in keep if k in train]
    if not fit_rows:
        raise DataError("fusion has no training rows to fit z-scores on")
    blocks, names, zmodels = [], [], []
    for X, ids, nm in parts:
        index = {k: i for i, k in enumerate(ids)}
        sub = X[[index[k] for k in keep]]
        z = dsp.zscore_fit(X[[index[k] for k in fit_rows]])
        blocks.append(dsp.zscore_apply(z, sub))
        names.extend(nm)
        zmodels.append(z)
    return np.hstack(blocks), keep, tuple(names), zmodels


# -- cells -------------------------------------------------------------------

@dataclass(frozen=True)
class FittedCell:
    """Everything learned for one (features, target, baseline mode)."""

    features: tuple
    target: str
    baseline_mode: str
    model: ElmModel
    cv: CvReport
    fusion_zscores: Optional[list]
    n_train: int
    feature_names: tuple


@dataclass(frozen=True)
class CellResult:
    target: str
    features: str
    baseline_mode: str
    accuracy: float
    chance: float
    n_train: int
    n_test: int

    def __post_init__(self):
        if not (0.0 <= self.accuracy <= 1.0 and 0.0 <= self.chance <= 1.0):
            raise ValueError("accuracy and chance must lie in [0, 1]")
        if self.n_test <= 0:
            raise ValueError("n_test must be positive")


def _assemble(features: tuple, ids: Sequence[TrialId], feats_cache: dict,
              train_ids: Sequence[TrialId],
              fusion_zscores: Optional[list]):
    """Rows for `ids`, fusing when the cell spans several modalities.

    For fused cells the group z-scores are fitted on train_ids when
    fusion_zscores is None (fit phase) and reused otherwise (evaluate
    phase).
    """
    idset = set(ids)
    parts = []
    for m in features:
        X, kept, names = feats_cache[m]
        index = [i for i, k in enumerate(kept) if k in idset]
        parts.append((X[index], [kept[i] for i in index], names))
    if len(features) == 1:
        X, kept, names = parts[0]
        return X, kept, names, None
    if fusion_zscores is None:
        return fuse(parts, train_ids)
    common = set(parts[0][1])
    for _, pids, _ in parts[1:]:
        common &= set(pids)
    keep = sorted(common)
    blocks, names = [], []
    for (X, pids, nm), z in zip(parts, fusion_zscores):
        index = {k: i for i, k in enumerate(pids)}
        blocks.append(dsp.zscore_apply(z, X[[index[k] for k in keep]]))
        names.extend(nm)
    return np.hstack(blocks), keep, tuple(names), fusion_zscores


def fit_cell(dataset: Dataset, train_ids: Sequence[TrialId],
             features: tuple, target: str, baseline_mode: str,
             cfg: ExperimentConfig, feats_cache: dict) -> \
        Optional[FittedCell]:
    """Train one cell on the training partition; None if it has a single
    class (skipped with a warning)."""
    by_key = _trials_by_key(dataset)
    X, kept, names, zs = _assemble(features, train_ids, feats_cache,
                                   train_ids, None)
    if len(kept) < 2:
        raise DataError(f"cell {features} has {len(kept)} usable training "
                        f"trials")
    y = [trial_label(by_key[k], target, baseline_mode) for k in kept]
    if len(set(y)) < 2:
        log.warning("skipping %s/%s/%s: single class %r in training data",
                    target, "+".join(features), baseline_mode, y[0])
        return None
    if len(y) < cfg.cv_folds:
        raise DataError(f"cell {features} has {len(y)} training trials, "
                        f"fewer than cv_folds={cfg.cv_folds}")
    cv = cross_validate(X, y, dict(cfg.elm_grid), k=cfg.cv_folds,
                        seed=cfg.elm_seed)
    model = elm_train(X, y, cv.chosen_hyperparams["L"],
                      cv.chosen_hyperparams["ridge_lambda"], cfg.elm_seed)
    return FittedCell(features=features, target=target,
                      baseline_mode=baseline_mode, model=model, cv=cv,
                      fusion_zscores=zs, n_train=len(kept),
                      feature_names=names)


def evaluate_cell(cell: FittedCell, dataset: Dataset,
                  test_ids: Sequence[TrialId],
                  feats_cache: dict) -> CellResult:
    by_key = _trials_by_key(dataset)
    X, kept, _, _ = _assemble(cell.features, test_ids, feats_cache,
                              (), cell.fusion_zscores)
    if not kept:
        raise DataError(f"cell {cell.features} has no usable test trials")
    y = [trial_label(by_key[k], cell.target, cell.baseline_mode)
         for k in kept]
    preds = elm_predict(cell.model, X)
    counts = {c: y.count(c) for c in set(y)}
    return CellResult(
        target=cell.target, features="+".join(cell.features),
        baseline_mode=cell.baseline_mode,
        accuracy=accuracy(preds, y),
        chance=max(counts.values()) / len(y),
        n_train=cell.n_train, n_test=len(kept))


def parameter_hash(cell: FittedCell, tf: FittedTransforms) -> str:
    """Digest of every fitted parameter this cell's predictions use."""
    h = hashlib.sha256()

    def eat(arr):
        h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())

    m = cell.model
    for arr in (m.input_weights, m.biases, m.output_weights,
                m.normalizer.mean, m.normalizer.std):
        eat(arr)
    h.update(repr(m.classes).encode())
    if "eeg" in cell.features and tf.eeg_pcas is not None:
        for band in sorted(tf.eeg_pcas):
            eat(tf.eeg_pcas[band].mean)
            eat(tf.eeg_pcas[band].components)
    if "face_embed" in cell.features and tf.face_pca is not None:
        eat(tf.face_pca.mean)
        eat(tf.face_pca.components)
    for z in cell.fusion_zscores or ():
        eat(z.mean)
        eat(z.std)
    return h.hexdigest()


# -- experiment driver -------------------------------------------------------

@dataclass(frozen=True)
class ResultsTable:
    rows: tuple

    def sorted_rows(self) -> list:
        return sorted(self.rows, key=lambda r: (r.target, r.features,
                                                r.baseline_mode))


def run_experiment(cfg: ExperimentConfig,
                   dataset: Optional[Dataset] = None) -> ResultsTable:
    if dataset is None:
        if not cfg.manifest:
            raise ConfigError("no dataset given and no manifest configured")
        dataset = load_manifest(cfg.manifest)
    train_ids, test_ids = split_dataset(dataset, cfg.split_fraction,
                                        cfg.split_seed)
    provider = get_provider(cfg.embedder)
    au_cfg = (load_au_config_csv(cfg.au_config) if cfg.au_config
              else DEFAULT_AU_CONFIG)
    needed = sorted({m for fs in cfg.feature_sets for m in fs})
    tf = fit_transforms(dataset, train_ids, needed, provider,
                        au_config=au_cfg)
    feats_cache = {m: extract_features(dataset, m, tf, provider)
                   for m in needed}
    rows = []
    for target in cfg.targets:
        for features in cfg.feature_sets:
            for mode in cfg.modes:
                cell = fit_cell(dataset, train_ids, features, target,
                                mode, cfg, feats_cache)
                if cell is None:
                    continue
                rows.append(evaluate_cell(cell, dataset, test_ids,
                                          feats_cache))
    return ResultsTable(rows=tuple(rows))


# -- report ------------------------------------------------------------------

def results_to_csv(table: ResultsTable) -> str:
    lines = [RESULTS_HEADER]
    for r in table.sorted_rows():
        lines.append(f"{r.target},{r.features},{r.baseline_mode},"
                     f"{r.accuracy},{r.chance},{r.n_train},{r.n_test}")
    return "\n".join(lines) + "\n"


def results_from_csv(text: str) -> ResultsTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != RESULTS_HEADER:
        raise DataError("results CSV has an unexpected header")
    rows = []
    for ln in lines[1:]:
        t, f, b, acc, ch, ntr, nte = ln.split(",")
        rows.append(CellResult(t, f, b, float(acc), float(ch),
                               int(ntr), int(nte)))
    return ResultsTable(rows=tuple(rows))


def render_text_table(table: ResultsTable) -> str:
    """Accuracy grid: one row per feature set, one column per
    (target, baseline mode), chance rate in parentheses."""
    rows = table.sorted_rows()
    if not rows:
        return "no results\n"
    feats = sorted({r.features for r in rows})
    cols = sorted({(r.target, r.baseline_mode) for r in rows})
    cells = {(r.features, (r.target, r.baseline_mode)): r for r in rows}
    head = ["features"] + [f"{t}/{b}" for t, b in cols]
    body = []
    for f in feats:
        line = [f]
        for c in cols:
            r = cells.get((f, c))
            line.append("-" if r is None
                        else f"{r.accuracy:.3f} ({r.chance:.3f})")
        body.append(line)
    widths = [max(len(row[i]) for row in [head] + body)
              for i in range(len(head))]
    out = ["  ".join(v.ljust(w) for v, w in zip(head, widths)).rstrip()]
    out.append("  ".join("-" * w for w in widths))
    for line in body:
        out.append("  ".join(v.ljust(w)
                             for v, w in zip(line, widths)).rstrip())
    out.append("")
    out.append("accuracy (majority-class chance); n_test per row in the "
               "results CSV")
    return "\n".join(out) + "\n"


def emit_report(table: ResultsTable, out_dir: str | Path) -> tuple[Path,
                                                                   Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    txt_path = out / "report.txt"
    csv_path.write_text(results_to_csv(table))
    txt_path.write_text(render_text_table(table))
    return csv_path, txt_path


# -- feature matrix files (CLI stage interop) --------------------------------

def save_features_csv(path: str | Path, X: np.ndarray,
                      ids: Sequence[TrialId], names: Sequence[str],
                      split_of: Mapping[TrialId, str]) -> None:
    df = pd.DataFrame(X, columns=list(names))
    df.insert(0, "subject_id", [k[0] for k in ids])
    df.insert(1, "video_id", [k[1] for k in ids])
    df.insert(2, "split", [split_of[k] for k in ids])
    df.to_csv(path, index=False, float_format=str)


def load_features_csv(path: str | Path):
    df = pd.read_csv(path, float_precision="round_trip")
    fixed = ["subject_id", "video_id", "split"]
    if list(df.columns[:3]) != fixed:
        raise DataError(f"{path}: feature CSV must start with "
                        f"{','.join(fixed)}")
    ids = [(str(s), str(v)) for s, v in zip(df.subject_id, df.video_id)]
    split = {k: str(s) for k, s in zip(ids, df.split)}
    names = tuple(df.columns[3:])
    X = df[list(names)].to_numpy(dtype=np.float64)
    return X, ids, names, split
