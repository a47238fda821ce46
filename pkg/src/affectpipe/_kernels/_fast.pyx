# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Mirrors `_pure.py` operation for operation; keep the floating-point
expression order identical in both files.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def moving_average(double[::1] x, long width):
    cdef Py_ssize_t n = x.shape[0]
    cdef long half_left = (width - 1) // 2
    cdef long half_right = width // 2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double[::1] prefix = np.empty(n + 1, dtype=np.float64)
    cdef Py_ssize_t i
    cdef long lo, hi
    cdef double acc = 0.0
    prefix[0] = 0.0
    for i in range(n):
        acc = acc + x[i]
        prefix[i + 1] = acc
    for i in range(n):
        lo = i - half_left
        if lo < 0:
            lo = 0
        hi = i + half_right
        if hi > n - 1:
            hi = n - 1
        o[i] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1)
    return out


def joint_hist(double[::1] x, double[::1] y,
               double lo_x, double hi_x, long n_bins_x,
               double lo_y, double hi_y, long n_bins_y):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] counts = np.zeros(
        (n_bins_x, n_bins_y), dtype=np.int64)
    cdef long[:, ::1] c = counts
    cdef Py_ssize_t k
    cdef long ix, iy
    for k in range(n):
        if n_bins_x > 1:
            ix = <long>((x[k] - lo_x) * n_bins_x / (hi_x - lo_x))
            if ix > n_bins_x - 1:
                ix = n_bins_x - 1
        else:
            ix = 0
        if n_bins_y > 1:
            iy = <long>((y[k] - lo_y) * n_bins_y / (hi_y - lo_y))
            if iy > n_bins_y - 1:
                iy = n_bins_y - 1
        else:
            iy = 0
        c[ix, iy] += 1
    return counts


def local_maxima(double[::1] x, double threshold):
    cdef Py_ssize_t n = x.shape[0]
    if n < 3:
        return np.empty(0, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] buf = np.empty(n, dtype=np.int64)
    cdef long[::1] b = buf
    cdef Py_ssize_t i, count = 0
    for i in range(1, n - 1):
        if x[i] > x[i - 1] and x[i] > x[i + 1] and x[i] > threshold:
            b[count] = i
            count += 1
    return buf[:count].copy()


def bilinear_resize(double[:, ::1] grid, long out_h, long out_w):
    cdef Py_ssize_t in_h = grid.shape[0]
    cdef Py_ssize_t in_w = grid.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty(
        (out_h, out_w), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double sy, sx, fy, fx
    cdef long y0, y1, x0, x1
    for i in range(out_h):
        sy = (i + 0.5) * in_h / out_h - 0.5
        if sy < 0.0:
            sy = 0.0
        y0 = <long>sy
        y1 = y0 + 1
        if y1 > in_h - 1:
            y1 = in_h - 1
        fy = sy - y0
        for j in range(out_w):
            sx = (j + 0.5) * in_w / out_w - 0.5
            if sx < 0.0:
                sx = 0.0
            x0 = <long>sx
            x1 = x0 + 1
            if x1 > in_w - 1:
                x1 = in_w - 1
            fx = sx - x0
            o[i, j] = (
                (1.0 - fy) * (1.0 - fx) * grid[y0, x0]
                + (1.0 - fy) * fx * grid[y0, x1]
                + fy * (1.0 - fx) * grid[y1, x0]
                + fy * fx * grid[y1, x1]
            )
    return out
