"""Compare the numba and numpy versions of the integer kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 50,100,200]

Each row reports the best wall time over the repeats and whether the two
versions agree.  The first numba call is compiled before timing.
"""

import argparse
import time

import numpy as np

from dworkmod import _kernels as K


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="50,100,200")
    ap.add_argument("--depth", type=int, default=10, help="T-degree of the truncated determinant")
    ap.add_argument("--modulus", type=int, default=2**13)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels can run")
        return
    rng = np.random.default_rng(args.seed)
    M, D = args.modulus, args.depth
    sizes = [int(s) for s in args.sizes.split(",")]

    # compile once
    K.berkowitz_numba(np.eye(2, dtype=np.int64), M, 2)
    K.conv_numba(np.ones(2, dtype=np.int64), np.ones(2, dtype=np.int64), M, 2)

    print(f"{'kernel':<12}{'size':>8}{'numpy s':>12}{'numba s':>12}{'speedup':>10}  agree")
    for n in sizes:
        A = rng.integers(0, M, size=(n, n), dtype=np.int64)
        tn, a = best_of(lambda: K.berkowitz_numpy(A, M, D), args.repeat)
        tj, b = best_of(lambda: K.berkowitz_numba(A, M, D), args.repeat)
        print(f"{'berkowitz':<12}{n:>8}{tn:>12.5f}{tj:>12.5f}{tn / tj:>10.1f}  {np.array_equal(a, b)}")
    for n in (s * 20 for s in sizes):
        a = rng.integers(0, M, size=n, dtype=np.int64)
        b = rng.integers(0, M, size=n, dtype=np.int64)
        tn, x = best_of(lambda: K.conv_numpy(a, b, M, 2 * n), args.repeat)
        tj, y = best_of(lambda: K.conv_numba(a, b, M, 2 * n), args.repeat)
        print(f"{'convolution':<12}{n:>8}{tn:>12.5f}{tj:>12.5f}{tn / tj:>10.1f}  {np.array_equal(x, y)}")


if __name__ == "__main__":
    main()
