import numpy as np
import pytest

from affectpipe import embedding
from affectpipe.data import EmbeddingFrame, _write_embeddings_csv


class TestStub64:
    def test_zero_raster_all_zeros(self):
        vec = embedding.Stub64Embedder().embed(np.zeros((224, 224)))
        assert vec.shape == (4096,)
        assert np.all(vec == 0.0)

    def test_deterministic(self):
        grid = np.random.default_rng(0).uniform(size=(224, 224))
        stub = embedding.Stub64Embedder()
        assert np.array_equal(stub.embed(grid), stub.embed(grid.copy()))

    def test_aligned_bright_block_hits_one_coarse_cell(self):
        # output cell i samples input at 3.5*i + 1.25; a block on input
        # rows/cols 28..31 covers only the cell sampling at 29.25
        grid = np.zeros((224, 224))
        grid[28:32, 28:32] = 1.0
        vec = embedding.Stub64Embedder().embed(grid).reshape(64, 64)
        nonzero = set(zip(*np.nonzero(vec)))
        assert nonzero == {(8, 8)}
        assert vec[8, 8] == 1.0

    def test_straddling_block_hits_expected_cells(self):
        # rows 30..33 straddle two rows of coarse samples (29.25, 32.75);
        # cols 0..3 only reach the first coarse column (sample at 1.25)
        grid = np.zeros((224, 224))
        grid[30:34, 0:4] = 1.0
        vec = embedding.Stub64Embedder().embed(grid).reshape(64, 64)
        nonzero = set(zip(*np.nonzero(vec)))
        assert nonzero == {(8, 0), (9, 0)}

    def test_values_bounded_by_input_range(self):
        grid = np.random.default_rng(1).uniform(-2, 5, size=(224, 224))
        vec = embedding.Stub64Embedder().embed(grid)
        assert vec.min() >= grid.min() and vec.max() <= grid.max()

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            embedding.Stub64Embedder().embed(np.zeros((64, 64)))

    def test_rejects_non_finite(self):
        grid = np.zeros((224, 224))
        grid[0, 0] = np.nan
        with pytest.raises(ValueError):
            embedding.Stub64Embedder().embed(grid)


class TestFileEmbedder:
    def _write_vector(self, path, seed=0):
        vec = np.random.default_rng(seed).normal(size=4096)
        _write_embeddings_csv(path, [EmbeddingFrame(0.0, vec)])
        return vec

    def test_reads_precomputed_vector(self, tmp_path):
        want = self._write_vector(tmp_path / "s1_v1_alpha.csv")
        provider = embedding.FileEmbedder(tmp_path)
        got = provider.embed(np.zeros((224, 224)), key="s1_v1_alpha")
        assert np.array_equal(got, want)

    def test_missing_file_names_expected_path(self, tmp_path):
        provider = embedding.FileEmbedder(tmp_path)
        with pytest.raises(embedding.EmbeddingUnavailable) as err:
            provider.embed(np.zeros((224, 224)), key="s9_v9_beta")
        assert "s9_v9_beta.csv" in str(err.value)

    def test_missing_key_rejected(self, tmp_path):
        provider = embedding.FileEmbedder(tmp_path)
        with pytest.raises(embedding.EmbeddingUnavailable):
            provider.embed(np.zeros((224, 224)))

    def test_multi_row_file_rejected(self, tmp_path):
        frames = [EmbeddingFrame(0.0, np.zeros(4096)),
                  EmbeddingFrame(1.0, np.zeros(4096))]
        _write_embeddings_csv(tmp_path / "k.csv", frames)
        provider = embedding.FileEmbedder(tmp_path)
        with pytest.raises(embedding.EmbeddingUnavailable):
            provider.embed(np.zeros((224, 224)), key="k")


class TestGetProvider:
    def test_stub(self):
        assert embedding.get_provider("stub64").name == "stub64"

    def test_file_with_dir(self, tmp_path):
        p = embedding.get_provider(f"file:{tmp_path}")
        assert p.name == "file"
        assert p.base_dir == tmp_path

    def test_unknown_rejected(self):
        with pytest.raises(ValueError):
            embedding.get_provider("vgg16")
        with pytest.raises(ValueError):
            embedding.get_provider("file:")
