"""Benchmark the compiled SMO solver against the pure-numpy fallback.

Both backends run the identical algorithm on identical kernel matrices,
so the comparison isolates interpreter overhead in the pair-selection
loop.

Usage:
    python benchmarks/bench_smo.py [--sizes 50,100,200,400] [--repeats 5]
"""

import argparse
import time

import numpy as np

from docclass import _smo_fallback
from docclass.svm import rbf_gram

try:
    from docclass import _smo as _smo_compiled
except ImportError:
    _smo_compiled = None


def make_problem(rng, n, dim=8, gap=1.5):
    half = n // 2
    X = np.vstack([
        rng.normal(0.0, 1.0, (half, dim)),
        rng.normal(gap, 1.0, (n - half, dim)),
    ])
    y = np.r_[np.ones(half), -np.ones(n - half)]
    K = rbf_gram(X, X, sigma=1.5)
    return np.ascontiguousarray(K), y


def run(solver, K, y, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = solver(K, y, 1.0, 1e-3, 10_000)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="50,100,200,400")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>6} {'python (ms)':>14} {'cython (ms)':>14} {'speedup':>9}")
    for n in sizes:
        K, y = make_problem(rng, n)
        t_py, res_py = run(_smo_fallback.smo_solve, K, y, args.repeats)
        if _smo_compiled is None:
            print(f"{n:>6} {t_py * 1e3:>14.3f} {'(unavailable)':>14} {'-':>9}")
            continue
        t_cy, res_cy = run(_smo_compiled.smo_solve, K, y, args.repeats)
        if not np.allclose(np.asarray(res_py[0]), np.asarray(res_cy[0]), atol=1e-10):
            raise RuntimeError(f"backends disagree at n={n}")
        print(f"{n:>6} {t_py * 1e3:>14.3f} {t_cy * 1e3:>14.3f} "
              f"{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
