"""Benchmark the compiled propagation kernel against the NumPy fallback.

Usage: python benchmarks/bench_kernel.py [--sizes 8,16,32,45] [--repeats 5]
"""

import argparse
import time

import numpy as np

from ccaqed import _kernel_py
from ccaqed.schedules import Hold, LinearRamp, PulseSchedule, SineModulation

try:
    from ccaqed import _kernel
except ImportError:
    _kernel = None


def make_problem(n, seed=0):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(n, n))
    h = 0.05 * (h + h.T)
    a = (h - 0.5j * np.diag(rng.uniform(1e-3, 1e-2, n))).astype(complex)
    sch = PulseSchedule(
        (
            Hold(0.3, 20.0),
            LinearRamp(0.3, 0.1, 40.0),
            SineModulation(0.1, 0.05, 0.4, 100.0, envelope="supergaussian",
                           order=2, width=30.0),
        )
    )
    c0 = np.zeros(n, dtype=complex)
    c0[-1] = 1.0
    t_rep = np.linspace(0.0, sch.duration, 161)
    ports = ((0, 1, 0.05, 0.01), (n - 2, n - 3, 0.04, 0.008))
    w_int = np.full(n, 1e-3)
    bounds, codes, params = sch.compile()
    return (a, n - 1, bounds, codes, params, c0, t_rep, ports, w_int)


def timeit(mod, args, repeats, rtol):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = mod.propagate(*args, rtol=rtol)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="8,16,32,45")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--rtol", type=float, default=1e-9)
    opts = ap.parse_args()
    sizes = [int(s) for s in opts.sizes.split(",")]

    print(f"{'n':>4} {'python (s)':>12} {'cython (s)':>12} {'speedup':>8} {'max |diff|':>11}")
    for n in sizes:
        args = make_problem(n)
        t_py, out_py = timeit(_kernel_py, args, opts.repeats, opts.rtol)
        if _kernel is None:
            print(f"{n:>4} {t_py:>12.4f} {'(not built)':>12}")
            continue
        t_cy, out_cy = timeit(_kernel, args, opts.repeats, opts.rtol)
        diff = max(np.max(np.abs(a - b)) for a, b in zip(out_py, out_cy))
        print(f"{n:>4} {t_py:>12.4f} {t_cy:>12.4f} {t_py / t_cy:>7.1f}x {diff:>11.2e}")


if __name__ == "__main__":
    main()
