"""Pluggable 4096-value embedders for 224x224 topographic rasters."""

from __future__ import annotations

from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

from . import _kernels
from .data import EMBEDDING_DIM, _read_embeddings_csv

GRID_SIZE = 224
STUB_SIZE = 64  # 64*64 == 4096


class EmbeddingUnavailable(Exception):
    """The configured provider cannot produce a vector for this input."""


@runtime_checkable
class EmbeddingProvider(Protocol):
    name: str

    def embed(self, grid: np.ndarray, key: str = "") -> np.ndarray:
        """Map a 224x224 row-major grid to 4096 reals.

        `key` identifies the trial+band for providers that look up
        precomputed vectors; grid-driven providers ignore it.
        """
        ...


def _check_grid(grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=np.float64)
    if grid.shape != (GRID_SIZE, GRID_SIZE):
        raise ValueError(f"grid must be {GRID_SIZE}x{GRID_SIZE}, "
                         f"got {grid.shape}")
    if not np.all(np.isfinite(grid)):
        raise ValueError("grid contains non-finite values")
    return grid


class Stub64Embedder:
    """Deterministic stand-in: bilinear resample to 64x64, flatten."""

    name = "stub64"

    def embed(self, grid: np.ndarray, key: str = "") -> np.ndarray:
        grid = _check_grid(grid)
        small = _kernels.bilinear_resize(grid, STUB_SIZE, STUB_SIZE)
        return small.ravel()


class FileEmbedder:
    """Serves vectors precomputed by the offline export tool.

    Expects one single-row EmbeddingFrame CSV per key at
    `<base_dir>/<key>.csv`.
    """

    name = "file"

    def __init__(self, base_dir: str | Path):
        self.base_dir = Path(base_dir)

    def embed(self, grid: np.ndarray, key: str = "") -> np.ndarray:
        _check_grid(grid)
        if not key:
            raise EmbeddingUnavailable("file provider needs a trial+band key")
        path = self.base_dir / f"{key}.csv"
        if not path.exists():
            raise EmbeddingUnavailable(
                f"no precomputed embedding at {path}; generate it with the "
                f"export tool or switch to the stub64 provider")
        try:
            frames = _read_embeddings_csv(path)
        except (ValueError, OSError) as exc:
            raise EmbeddingUnavailable(f"cannot read {path}: {exc}") from exc
        if len(frames) != 1 or frames[0].vector.size != EMBEDDING_DIM:
            raise EmbeddingUnavailable(
                f"{path} must hold exactly one {EMBEDDING_DIM}-value row")
        return frames[0].vector


def get_provider(spec: str) -> EmbeddingProvider:
    """Build a provider from a config string: "stub64" or "file:<dir>"."""
    if spec == "stub64":
        return Stub64Embedder()
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        if not path:
            raise ValueError("file provider needs a directory: 'file:<dir>'")
        return FileEmbedder(path)
    raise ValueError(f"unknown embedding provider {spec!r}")
