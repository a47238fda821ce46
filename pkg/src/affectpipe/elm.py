"""Extreme learning machine: random hidden layer, ridge-solved readout.

The hidden layer is fixed at training time (uniform [-1, 1] weights and
biases from a seeded generator, sigmoid activation); only the output
weights are learned, by solving the regularized normal equations
(H'H + lambda*I) B = H'T against one-hot targets. Feature z-scoring is
fitted inside the model so a serialized model is self-contained.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import dsp

DEFAULT_GRID = {"L": (100, 250, 500, 1000),
                "ridge_lambda": (1e-6, 1e-3, 1e-1, 1.0)}


@dataclass(frozen=True)
class ElmModel:
    input_weights: np.ndarray    # [L x d]
    biases: np.ndarray           # [L]
    output_weights: np.ndarray   # [L x C]
    classes: tuple               # ordered labels, C >= 2
    ridge_lambda: float
    seed: int
    normalizer: dsp.ZScoreModel

    def __post_init__(self):
        L, d = self.input_weights.shape
        C = self.output_weights.shape[1]
        if len(self.classes) != C:
            raise ValueError("class list does not match output width")
        if C < 2:
            raise ValueError("need at least 2 classes")
        if self.biases.shape != (L,) or self.output_weights.shape[0] != L:
            raise ValueError("inconsistent hidden dimension")
        if self.normalizer.mean.shape[0] != d:
            raise ValueError("normalizer dimension does not match input")
        for arr in (self.input_weights, self.biases, self.output_weights):
            if not np.all(np.isfinite(arr)):
                raise ValueError("model weights must be finite")
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be >= 0")

    @property
    def input_dim(self) -> int:
        return self.input_weights.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.input_weights.shape[0]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form avoids overflow in exp for large negative inputs
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def hidden_activations(m: ElmModel, X) -> np.ndarray:
    Xn = dsp.zscore_apply(m.normalizer, np.asarray(X, dtype=np.float64))
    return _sigmoid(Xn @ m.input_weights.T + m.biases)


def _check_features(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-D [n x d]")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain NaN or infinity")
    return X


def elm_train(X, y: Sequence, L: int, ridge_lambda: float,
              seed: int) -> ElmModel:
    """Fit output weights by ridge-regularized least squares.

    Deterministic: the hidden layer is drawn from default_rng(seed) and
    the solve is direct. With ridge_lambda = 0 a rank-deficient hidden
    Gram matrix raises with a hint to use a positive lambda.
    """
    X = _check_features(X)
    y = list(y)
    n, d = X.shape
    if len(y) != n:
        raise ValueError("X and y length mismatch")
    # numpy scalar labels are unwrapped so models always serialize
    classes = tuple(v.item() if isinstance(v, np.generic) else v
                    for v in sorted(set(y), key=str))
    C = len(classes)
    if C < 2:
        raise ValueError("need at least 2 classes in y")
    if L < 1:
        raise ValueError("hidden dimension must be >= 1")
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be >= 0")

    norm = dsp.zscore_fit(X)
    rng = np.random.default_rng(seed)
    W = rng.uniform(-1.0, 1.0, size=(L, d))
    b = rng.uniform(-1.0, 1.0, size=L)
    H = _sigmoid(dsp.zscore_apply(norm, X) @ W.T + b)

    col = {c: j for j, c in enumerate(classes)}
    T = np.zeros((n, C))
    T[np.arange(n), [col[v] for v in y]] = 1.0

    A = H.T @ H + ridge_lambda * np.eye(L)
    singular_msg = ("hidden-layer Gram matrix is singular with "
                    "ridge_lambda=0; use ridge_lambda > 0")
    if ridge_lambda == 0.0:
        # rank-deficient H'H has eigenvalues at rounding level; any
        # positive lambda makes A definite so the check is skipped
        w = np.linalg.eigvalsh(A)
        if w[0] <= max(w[-1], 0.0) * 1e-10:
            raise ValueError(singular_msg)
    try:
        B = np.linalg.solve(A, H.T @ T)
    except np.linalg.LinAlgError:
        raise ValueError(singular_msg) from None
    return ElmModel(input_weights=W, biases=b, output_weights=B,
                    classes=classes, ridge_lambda=float(ridge_lambda),
                    seed=int(seed), normalizer=norm)


def elm_scores(m: ElmModel, X) -> np.ndarray:
    X = _check_features(X)
    if X.shape[1] != m.input_dim:
        raise ValueError(f"expected {m.input_dim} columns, got {X.shape[1]}")
    return hidden_activations(m, X) @ m.output_weights


def elm_predict(m: ElmModel, X) -> list:
    """Argmax over class scores; exact ties pick the earlier class."""
    scores = elm_scores(m, X)
    return [m.classes[j] for j in np.argmax(scores, axis=1)]


def accuracy(predicted: Sequence, actual: Sequence) -> float:
    predicted, actual = list(predicted), list(actual)
    if len(predicted) != len(actual) or not actual:
        raise ValueError("need equal-length non-empty label lists")
    hits = sum(p == a for p, a in zip(predicted, actual))
    return hits / len(actual)


# -- serialization -----------------------------------------------------------

def model_to_json(m: ElmModel) -> str:
    doc = {
        "format": "elm-model",
        "input_dim": m.input_dim,
        "hidden_dim": m.hidden_dim,
        "classes": list(m.classes),
        "ridge_lambda": m.ridge_lambda,
        "seed": m.seed,
        "normalizer": {
            "mean": m.normalizer.mean.tolist(),
            "std": m.normalizer.std.tolist(),
            "zero_variance": [bool(v) for v in m.normalizer.zero_variance],
        },
        "input_weights": m.input_weights.tolist(),
        "biases": m.biases.tolist(),
        "output_weights": m.output_weights.tolist(),
    }
    return json.dumps(doc, indent=1)


def model_from_json(text: str) -> ElmModel:
    doc = json.loads(text)
    if doc.get("format") != "elm-model":
        raise ValueError("not an ELM model document")
    norm = dsp.ZScoreModel(
        mean=np.array(doc["normalizer"]["mean"], dtype=np.float64),
        std=np.array(doc["normalizer"]["std"], dtype=np.float64),
        zero_variance=np.array(doc["normalizer"]["zero_variance"],
                               dtype=bool))
    return ElmModel(
        input_weights=np.array(doc["input_weights"], dtype=np.float64),
        biases=np.array(doc["biases"], dtype=np.float64),
        output_weights=np.array(doc["output_weights"], dtype=np.float64),
        classes=tuple(doc["classes"]),
        ridge_lambda=float(doc["ridge_lambda"]),
        seed=int(doc["seed"]),
        normalizer=norm)


def save_model(m: ElmModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(m))


def load_model(path: str | Path) -> ElmModel:
    return model_from_json(Path(path).read_text())


# -- cross-validation --------------------------------------------------------

@dataclass(frozen=True)
class CvReport:
    fold_accuracies: tuple[float, ...]
    mean_accuracy: float
    chosen_hyperparams: dict

    def __post_init__(self):
        if not all(0.0 <= a <= 1.0 for a in self.fold_accuracies):
            raise ValueError("fold accuracies must lie in [0, 1]")


def make_folds(y: Sequence, k: int, seed: int) -> list[np.ndarray]:
    """Deterministic stratified k-fold assignment (round-robin per class).

    The dealing cursor carries across classes so total fold sizes differ
    by at most 1. Classes with fewer than k members trigger a fallback
    to plain shuffled folds, with a warning.
    """
    y = list(y)
    n = len(y)
    if k < 2 or k > n:
        raise ValueError(f"k={k} out of range [2, {n}]")
    rng = np.random.default_rng(seed)
    counts = {c: y.count(c) for c in sorted(set(y), key=str)}
    folds: list[list[int]] = [[] for _ in range(k)]
    if min(counts.values()) < k:
        small = [c for c, m in counts.items() if m < k]
        warnings.warn(f"classes {small} have fewer than k={k} members; "
                      f"using non-stratified folds", stacklevel=2)
        order = rng.permutation(n)
        for pos, idx in enumerate(order):
            folds[pos % k].append(int(idx))
    else:
        cursor = 0
        for c in counts:
            members = [i for i, v in enumerate(y) if v == c]
            for idx in rng.permutation(len(members)):
                folds[cursor % k].append(members[idx])
                cursor += 1
    return [np.sort(np.array(f, dtype=int)) for f in folds]


def _grid_points(grid: dict):
    Ls = sorted(int(v) for v in grid["L"])
    lams = sorted(float(v) for v in grid["ridge_lambda"])
    return [(L, lam) for L in Ls for lam in lams]


def cross_validate(X, y: Sequence, grid: dict = DEFAULT_GRID, k: int = 10,
                   seed: int = 0) -> CvReport:
    """Pick (L, lambda) by mean accuracy over deterministic k folds.

    Ties go to the smaller L, then the smaller lambda; iterating the
    sorted grid with a strict improvement test enforces that.
    """
    X = _check_features(X)
    y = list(y)
    folds = make_folds(y, k, seed)
    all_idx = np.arange(len(y))
    best = None
    for L, lam in _grid_points(grid):
        accs = []
        for fold in folds:
            mask = np.ones(len(y), dtype=bool)
            mask[fold] = False
            train = all_idx[mask]
            m = elm_train(X[train], [y[i] for i in train], L, lam, seed)
            accs.append(accuracy(elm_predict(m, X[fold]),
                                 [y[i] for i in fold]))
        mean = float(np.mean(accs))
        if best is None or mean > best[0]:
            best = (mean, L, lam, tuple(accs))
    mean, L, lam, accs = best
    return CvReport(fold_accuracies=accs, mean_accuracy=mean,
                    chosen_hyperparams={"L": L, "ridge_lambda": lam})
