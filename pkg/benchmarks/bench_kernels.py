"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is checked for identical output before timing.
"""
import argparse
import math
import time

import numpy as np

from bandgap_qed import _kernels_py as pure
from bandgap_qed.core import enumerate_basis

try:
    from bandgap_qed import _kernels as compiled
except ImportError:
    compiled = None


def _best(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases():
    rng = np.random.default_rng(0)
    sites = np.arange(50)
    cos_t, sin_t = np.cos(0.5 * math.pi * sites), np.sin(0.5 * math.pi * sites)
    masks = enumerate_basis(20, 2).masks
    K = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    coeffs = rng.normal(size=20) + 1j * rng.normal(size=20)
    seeds = np.arange(20000, dtype=np.uint64)
    return {
        "uniforms (20k seeds x 16)": lambda m: m.uniforms(seeds, 16),
        "sample_sites (N=200, n=20, 20k)": lambda m: m.sample_sites(200, 20, seeds),
        "search_overlap (n=6, N=50, 200k)": lambda m: m.search_overlap(50, 6, 0, 200000, cos_t,
                                                                        sin_t, 0.322),
        "hopping_matrix (n=20, m<=2)": lambda m: m.hopping_matrix(masks, K),
        "raising_matrix (n=20, m<=2)": lambda m: m.raising_matrix(masks, coeffs),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels not built; only the fallback can be timed")
    print(f"{'kernel':38s} {'fallback [s]':>13s} {'compiled [s]':>13s} {'speed-up':>9s}")
    for name, fn in cases().items():
        t_pure = _best(lambda: fn(pure), args.repeat)
        if compiled is None:
            print(f"{name:38s} {t_pure:13.4f} {'-':>13s} {'-':>9s}")
            continue
        if not _same(fn(pure), fn(compiled)):
            raise SystemExit(f"backends disagree on {name}")
        t_c = _best(lambda: fn(compiled), args.repeat)
        print(f"{name:38s} {t_pure:13.4f} {t_c:13.4f} {t_pure / t_c:8.1f}x")


if __name__ == "__main__":
    main()
