"""Pure-numpy fallback implementations of the hot kernels.

Kept in lockstep with `_fast.pyx`: the arithmetic below uses the same
expression order as the Cython loops so both backends produce matching
results (exactly for the integer-valued kernels, to within a few ulps for
the float ones; `np.cumsum` accumulates sequentially like the C loop).
"""

import numpy as np


def moving_average(x, width):
    """Centered moving mean with edge truncation.

    The window spans ``(w-1)//2`` samples to the left and ``w//2`` to the
    right; near the edges the mean is taken over whatever samples exist.
    """
    n = x.shape[0]
    half_left = (width - 1) // 2
    half_right = width // 2
    prefix = np.empty(n + 1, dtype=np.float64)
    prefix[0] = 0.0
    np.cumsum(x, out=prefix[1:])
    idx = np.arange(n)
    lo = np.maximum(idx - half_left, 0)
    hi = np.minimum(idx + half_right, n - 1)
    return (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1)


def joint_hist(x, y, lo_x, hi_x, n_bins_x, lo_y, hi_y, n_bins_y):
    """Joint histogram counts over equal-width bins spanning [lo, hi] per axis.

    A degenerate axis (``n_bins == 1``) puts every sample in bin 0. Values at
    the top edge land in the last bin.
    """
    n = x.shape[0]
    if n_bins_x > 1:
        ix = ((x - lo_x) * n_bins_x / (hi_x - lo_x)).astype(np.int64)
        np.minimum(ix, n_bins_x - 1, out=ix)
    else:
        ix = np.zeros(n, dtype=np.int64)
    if n_bins_y > 1:
        iy = ((y - lo_y) * n_bins_y / (hi_y - lo_y)).astype(np.int64)
        np.minimum(iy, n_bins_y - 1, out=iy)
    else:
        iy = np.zeros(n, dtype=np.int64)
    flat = np.bincount(ix * n_bins_y + iy, minlength=n_bins_x * n_bins_y)
    return flat.reshape(n_bins_x, n_bins_y).astype(np.int64)


def local_maxima(x, threshold):
    """Indices of strict local maxima above threshold (endpoints excluded)."""
    if x.shape[0] < 3:
        return np.empty(0, dtype=np.int64)
    mid = x[1:-1]
    mask = (mid > x[:-2]) & (mid > x[2:]) & (mid > threshold)
    return (np.nonzero(mask)[0] + 1).astype(np.int64)


def bilinear_resize(grid, out_h, out_w):
    """Bilinear resample of a 2-D grid using half-pixel-centered sampling."""
    in_h, in_w = grid.shape
    sy = np.maximum((np.arange(out_h) + 0.5) * in_h / out_h - 0.5, 0.0)
    sx = np.maximum((np.arange(out_w) + 0.5) * in_w / out_w - 0.5, 0.0)
    y0 = sy.astype(np.int64)
    x0 = sx.astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (sy - y0)[:, None]
    fx = (sx - x0)[None, :]
    a = grid[np.ix_(y0, x0)]
    b = grid[np.ix_(y0, x1)]
    c = grid[np.ix_(y1, x0)]
    d = grid[np.ix_(y1, x1)]
    return (
        (1.0 - fy) * (1.0 - fx) * a
        + (1.0 - fy) * fx * b
        + fy * (1.0 - fx) * c
        + fy * fx * d
    )
