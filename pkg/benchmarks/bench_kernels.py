"""Compare the numba and numpy lanes of the exponential-sum kernel.

Usage:
    python benchmarks/bench_kernels.py [--sizes 64,256,1024] [--nodes 256]

Times ``exp_weighted_sum`` (the inner loop of every spectral transform) for
batches of spectral points against one quadrature rule, in both lanes.  The
numba path is skipped when numba is not importable or ``TRIDTN_NUMBA=0``.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from tridtn import kernels


def _time(fn, *args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="64,256,1024,4096")
    ap.add_argument("--nodes", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    s = np.linspace(-0.5, 0.5, args.nodes)
    fw = rng.standard_normal(args.nodes) + 1j * rng.standard_normal(args.nodes)

    print(f"nodes per rule: {args.nodes}")
    print(f"numba lane available: {kernels.USE_NUMBA}")
    print(f"{'batch':>8} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9} {'max diff':>10}")
    for m in (int(t) for t in args.sizes.split(",")):
        mu = rng.uniform(-30.0, 30.0, m) + 1j * rng.uniform(-60.0, 60.0, m)
        shift = np.where(mu.real > 0, 0.5, -0.5)
        t_np, ref = _time(kernels._exp_dot_numpy, mu, s, fw, shift)
        if kernels.USE_NUMBA:
            kernels._exp_dot_numba(mu, s, fw, shift)  # warm up the JIT
            t_nb, got = _time(kernels._exp_dot_numba, mu, s, fw, shift)
            diff = float(np.max(np.abs(got - ref)) / np.max(np.abs(ref)))
            print(f"{m:>8} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} "
                  f"{t_np / t_nb:>9.2f} {diff:>10.2e}")
        else:
            print(f"{m:>8} {1e3 * t_np:>12.3f} {'-':>12} {'-':>9} {'-':>10}")


if __name__ == "__main__":
    main()
