"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from ixfootprint import _pykernels
from ixfootprint.calib_stats import convex_hull
from ixfootprint.geometry import HORIZON_EPS

try:
    from ixfootprint import _ckernels
except ImportError:
    _ckernels = None


def make_params(n, seed=0):
    rng = np.random.default_rng(seed)
    base = np.array([0.0, 0.0, 6.0, math.radians(20), math.radians(30), 1200.0, 150.0, 80.0])
    sig = np.array([0.1, 0.1, 0.2, 3e-6, 3e-6, 0.3, 0.2, 0.2])
    return np.ascontiguousarray(base + rng.standard_normal((n, 8)) * sig)


def make_hulls(count, seed=0):
    rng = np.random.default_rng(seed)
    hulls = []
    for _ in range(count):
        c = rng.uniform(100, 1800, size=2)
        hulls.append(convex_hull(c + rng.normal(scale=150, size=(40, 2))))
    return hulls


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<8} {best * 1e3:9.2f} ms")
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1_000_000, help="projections per call")
    ap.add_argument("--boards", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"numpy": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels not built; timing numpy only")

    params = make_params(args.n)
    print(f"project_batch, {args.n} rows")
    times = {name: bench(name, lambda m=m: m.project_batch(params, HORIZON_EPS), args.repeat)
             for name, m in backends.items()}
    if len(times) == 2:
        print(f"  speedup  {times['numpy'] / times['cython']:9.2f}x")

    hulls = make_hulls(args.boards)
    print(f"hull_coverage, {args.boards} boards on a 1920x1080 image, 5 px cells")

    def cover(m):
        counts = np.zeros((216, 384), dtype=np.int64)
        for h in hulls:
            m.hull_coverage(counts, h, 5.0)
        return counts

    times = {name: bench(name, lambda m=m: cover(m), args.repeat) for name, m in backends.items()}
    if len(times) == 2:
        print(f"  speedup  {times['numpy'] / times['cython']:9.2f}x")
        assert np.array_equal(cover(_ckernels), cover(_pykernels))


if __name__ == "__main__":
    main()
