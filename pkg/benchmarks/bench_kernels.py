"""Time the strip kernels: numba loop against the numpy broadcast.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one row per (n_int, method) with the best-of-repeat time of each
backend and the max relative difference between their outputs.  The first
numba call (compilation or cache load) is timed separately.
"""

import argparse
import time

import numpy as np

from imspekit import Design, DiskSpec, Hyperparameters, imspe_converged, kernels
from imspekit._accel import NUMBA_AVAILABLE
from imspekit.rmatrix import strip_geometry


def _args(n_int, method, n=4, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-0.7, 0.7, (n, 2))
    c, ws, wa = strip_geometry(n_int)
    w = ws if method == "A" else wa
    outer = kernels.OUTER_ERF if method == "B" else kernels.OUTER_MIDPOINT
    ei, ej = kernels.entry_index(n)
    return x[:, 0], x[:, 1], ei, ej, 0.128, 0.00016, c, w, 1.0 / n_int, outer


def _best(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not NUMBA_AVAILABLE:
        print("numba is not installed; only the numpy backend can be timed")
        return
    t = time.perf_counter()
    kernels.disk_terms_numba(*_args(16, "C"))
    print(f"first numba call (compile or cache load): {time.perf_counter() - t:.3f}s")
    print(f"{'n_int':>6} {'method':>6} {'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8} {'max rel diff':>13}")
    for n_int in (64, 256, 1024, 4096, 16384):
        for m in "ABC":
            a = _args(n_int, m)
            tn, on = _best(kernels.disk_terms_numba, a, args.repeat)
            tp, op = _best(kernels.disk_terms_numpy, a, args.repeat)
            diff = float(np.max(np.abs(on - op) / np.maximum(np.abs(op), 1e-300)))
            print(f"{n_int:>6} {m:>6} {tn * 1e3:>11.3f} {tp * 1e3:>11.3f} {tp / tn:>8.2f} {diff:>13.1e}")
    # end to end: a converged double-precision evaluation on the full ladder
    d = Design([(0.6, 0.1), (-0.6, -0.1), (0.05, 0.5), (-0.05, -0.5)])
    h = Hyperparameters(1.0, 1.0)
    for backend in ("numba", "numpy"):
        t = time.perf_counter()
        v = imspe_converged(d, h, DiskSpec(), ladder=(16, 1024), backend=backend)
        print(f"imspe_converged 16..1024 [{backend}]: {time.perf_counter() - t:.3f}s value={float(v.value):.12f}")


if __name__ == "__main__":
    main()
