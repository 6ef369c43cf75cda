#!/usr/bin/env python3
"""Benchmark the compiled scan core against the pure-Python fallback.

Times the four inner-loop kernels on random potentials across class
counts, then an end-to-end stochastic training run through whichever
backend is active.  Force the fallback with ADVLOSS_PURE_PYTHON=1 and
compare:

    python benchmarks/bench_backends.py
    ADVLOSS_PURE_PYTHON=1 python benchmarks/bench_backends.py
"""

import time

import numpy as np

from advloss import Dataset, MulticlassFeatures, ZeroOne, backend_name
from advloss import _core_py
from advloss.training import train_pegasos_linear

try:
    from advloss import _core as _compiled
except ImportError:
    _compiled = None

REPEATS = 20000


def time_kernel(fn, args_list):
    start = time.perf_counter()
    for args in args_list:
        fn(*args)
    return time.perf_counter() - start


def scan_rows(k, rng):
    f = [np.ascontiguousarray(rng.normal(size=k)) for _ in range(REPEATS)]
    sorted_f = [np.ascontiguousarray(-np.sort(-v)) for v in f]
    return {
        "zero_one_best_prefix": [(v, 1.0) for v in sorted_f],
        "ordinal_abs_best_pair": [(v, 1.0) for v in f],
        "ordinal_sq_best_triple": [(v, 1.0) for v in f],
        "abstain_best": [(v, 0.4) for v in f],
    }


def main():
    rng = np.random.default_rng(0)
    backends = [("pure-python", _core_py)]
    if _compiled is not None:
        backends.append(("compiled", _compiled))

    print(f"active package backend: {backend_name()}")
    print(f"{'kernel':<26} {'k':>3} " +
          " ".join(f"{name:>14}" for name, _ in backends) + "  speedup")
    for k in (3, 5, 10):
        rows = scan_rows(k, rng)
        for kernel_name, args_list in rows.items():
            times = [time_kernel(getattr(mod, kernel_name), args_list)
                     for _, mod in backends]
            per_call = [f"{1e6 * t / REPEATS:>11.2f} us" for t in times]
            speedup = f"{times[0] / times[-1]:>6.1f}x" if len(times) > 1 else "   n/a"
            print(f"{kernel_name:<26} {k:>3} " + " ".join(per_call) + f"  {speedup}")

    n, m = 60, 4
    X = rng.normal(size=(n, m))
    y = rng.integers(1, 4, size=n)
    y[:3] = [1, 2, 3]
    data = Dataset(X, y, 3)
    fmap = MulticlassFeatures(m, 3)
    start = time.perf_counter()
    train_pegasos_linear(data, ZeroOne(), fmap, lam=0.01, n_steps=20000, seed=0)
    elapsed = time.perf_counter() - start
    print(f"\nstochastic training, 20000 steps ({backend_name()} backend): "
          f"{elapsed:.2f}s ({1e6 * elapsed / 20000:.0f} us/step)")


if __name__ == "__main__":
    main()
