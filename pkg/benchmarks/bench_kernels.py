#!/usr/bin/env python3
"""Time the compiled kernels against the pure-numpy fallback.

Both backends are imported directly (bypassing the import-time selection in
``affectpipe._kernels``) so one process can compare them side by side. Each
kernel runs on a representative workload: signal lengths and grid sizes match
what the feature extractors actually feed them.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from affectpipe._kernels import _pure

try:
    from affectpipe._kernels import _fast
except ImportError:
    _fast = None


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(rng):
    sig = rng.standard_normal(60 * 256)
    x = rng.standard_normal(4096)
    y = rng.standard_normal(4096)
    grid = rng.standard_normal((224, 224))
    return [
        ("moving_average  (15360 x w=64)", "moving_average", (sig, 64)),
        ("joint_hist      (4096, 16x16)", "joint_hist",
         (x, y, -4.0, 4.0, 16, -4.0, 4.0, 16)),
        ("local_maxima    (15360)", "local_maxima", (sig, 0.5)),
        ("bilinear_resize (224 -> 64)", "bilinear_resize", (grid, 64, 64)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repeats per kernel (best-of is kept)")
    args = parser.parse_args()

    if _fast is None:
        print("compiled backend not built; timing pure backend only")

    rng = np.random.default_rng(7)
    rows = []
    for label, name, call_args in workloads(rng):
        t_pure = _time(getattr(_pure, name), call_args, args.repeats)
        if _fast is not None:
            t_fast = _time(getattr(_fast, name), call_args, args.repeats)
            a = np.asarray(getattr(_pure, name)(*call_args))
            b = np.asarray(getattr(_fast, name)(*call_args))
            agree = np.allclose(a, b, rtol=1e-12, atol=1e-12)
            rows.append((label, t_pure, t_fast, t_pure / t_fast, agree))
        else:
            rows.append((label, t_pure, None, None, True))

    print(f"{'kernel':34} {'pure (ms)':>10} {'fast (ms)':>10} "
          f"{'speedup':>8}  agree")
    for label, t_pure, t_fast, speed, agree in rows:
        if t_fast is None:
            print(f"{label:34} {t_pure * 1e3:10.3f} {'-':>10} {'-':>8}")
        else:
            print(f"{label:34} {t_pure * 1e3:10.3f} {t_fast * 1e3:10.3f} "
                  f"{speed:7.1f}x  {agree}")


if __name__ == "__main__":
    main()
