"""Constructed waveforms shared by the signal-feature tests."""

import numpy as np


def bump_train(centers_s, rate_hz, duration_s, height=1.0, width_s=0.06):
    """Sum of Gaussian bumps; survives box smoothing with unique maxima."""
    t = np.arange(int(round(duration_s * rate_hz))) / rate_hz
    x = np.zeros_like(t)
    heights = np.broadcast_to(np.asarray(height, dtype=float),
                              (len(centers_s),))
    for c, h in zip(centers_s, heights):
        x += h * np.exp(-0.5 * ((t - c) / width_s) ** 2)
    return x
