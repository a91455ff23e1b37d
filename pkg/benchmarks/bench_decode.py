"""Compare the compiled decode kernel against the pure-Python fallback.

Usage: python benchmarks/bench_decode.py [iterations]
"""

import sys
import time

import numpy as np

from csma_sic._decode_py import decode_feasible as decode_py
from csma_sic._kernel import KERNEL_BACKEND, decode_feasible as decode_fast


def make_cases(rng, n_cases, max_signals=12):
    cases = []
    for _ in range(n_cases):
        m = int(rng.integers(2, max_signals + 1))
        gains = rng.uniform(0.01, 5.0, size=m)
        tx_ids = np.arange(m, dtype=np.int64)
        target = int(rng.integers(0, m))
        betas = np.full(m, 1.5)
        cases.append((gains, tx_ids, target, betas,
                      float(rng.uniform(0.0, 0.3)),
                      float(rng.choice([1.0, 0.8, 0.5]))))
    return cases


def bench(fn, cases, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        for args in cases:
            fn(*args)
    return time.perf_counter() - t0


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    rng = np.random.default_rng(0)
    cases = make_cases(rng, 500)
    n_calls = repeats * len(cases)

    for args in cases:  # sanity: both kernels agree
        assert decode_fast(*args) == decode_py(*args)

    t_py = bench(decode_py, cases, repeats)
    print(f"pure python : {n_calls / t_py:12.0f} decodes/s "
          f"({t_py * 1e9 / n_calls:7.0f} ns/call)")
    if KERNEL_BACKEND == "cython":
        t_cy = bench(decode_fast, cases, repeats)
        print(f"cython      : {n_calls / t_cy:12.0f} decodes/s "
              f"({t_cy * 1e9 / n_calls:7.0f} ns/call)")
        print(f"speedup     : {t_py / t_cy:.1f}x")
    else:
        print("compiled kernel not available; only the fallback was timed")


if __name__ == "__main__":
    main()
