"""The compiled and pure backends must be interchangeable bit for bit."""

import numpy as np
import pytest

from affectpipe import _kernels
from affectpipe._kernels import _pure

try:
    from affectpipe._kernels import _fast
except ImportError:
    _fast = None

needs_compiled = pytest.mark.skipif(
    _fast is None, reason="compiled backend not built")


def _cases(rng):
    yield rng.normal(size=500)
    yield rng.uniform(-3, 3, size=33)
    yield np.zeros(50)
    yield np.full(40, 1.5)
    yield rng.normal(size=3)


@needs_compiled
def test_moving_average_identical():
    rng = np.random.default_rng(100)
    for x in _cases(rng):
        for width in (1, 2, 3, 5, 32):
            if width > len(x):
                continue
            assert np.array_equal(_pure.moving_average(x, width),
                                  _fast.moving_average(x, width))


@needs_compiled
def test_joint_hist_identical():
    rng = np.random.default_rng(101)
    for x in _cases(rng):
        y = rng.normal(size=len(x))
        for nb in (2, 7, 16):
            # a degenerate axis must be collapsed to one bin by the caller
            nbx = nb if x.max() > x.min() else 1
            a = _pure.joint_hist(x, y, x.min(), x.max(), nbx,
                                 y.min(), y.max(), nb)
            b = _fast.joint_hist(x, y, x.min(), x.max(), nbx,
                                 y.min(), y.max(), nb)
            assert np.array_equal(a, b)


@needs_compiled
def test_local_maxima_identical():
    rng = np.random.default_rng(102)
    for x in _cases(rng):
        for thr in (-1.0, 0.0, 0.5):
            assert np.array_equal(_pure.local_maxima(x, thr),
                                  _fast.local_maxima(x, thr))


@needs_compiled
def test_bilinear_resize_identical():
    rng = np.random.default_rng(103)
    for shape in [(224, 224), (17, 17), (5, 9), (1, 1)]:
        g = rng.normal(size=shape)
        for out in [(64, 64), (3, 3), (10, 7)]:
            assert np.array_equal(_pure.bilinear_resize(g, *out),
                                  _fast.bilinear_resize(g, *out))


def test_moving_average_counts_partial_windows():
    x = np.array([0.0, 0.0, 4.0, 0.0, 0.0])
    out = _kernels.moving_average(x, 3)
    np.testing.assert_allclose(out, [0, 4 / 3, 4 / 3, 4 / 3, 0])
    # edges average over the samples that exist, not zero padding
    out2 = _kernels.moving_average(np.array([6.0, 0.0, 0.0]), 3)
    assert out2[0] == 3.0


def test_joint_hist_total_count_and_clamp():
    x = np.array([0.0, 0.5, 1.0])
    h = _kernels.joint_hist(x, x, 0.0, 1.0, 2, 0.0, 1.0, 2)
    assert h.sum() == 3
    assert h[1, 1] == 2  # 0.5 lands in upper half; 1.0 clamps into last bin


def test_joint_hist_degenerate_axis_single_bin():
    x = np.full(5, 2.0)
    y = np.arange(5.0)
    h = _kernels.joint_hist(x, y, 2.0, 2.0, 1, 0.0, 4.0, 4)
    assert h.shape == (1, 4)
    assert h.sum() == 5


def test_local_maxima_excludes_endpoints_and_plateaus():
    x = np.array([5.0, 1.0, 3.0, 3.0, 1.0, 5.0])
    assert _kernels.local_maxima(x, 0.0).size == 0


def test_bilinear_resize_constant_preserved():
    g = np.full((224, 224), 0.37)
    out = _kernels.bilinear_resize(g, 64, 64)
    assert out.shape == (64, 64)
    assert np.allclose(out, 0.37)


def test_backend_name_reports_selection():
    assert _kernels.backend_name() in ("compiled", "pure")
    assert (_kernels.backend_name() == "compiled") == _kernels.USING_COMPILED
