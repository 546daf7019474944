"""Throughput benchmark: numba-jitted rollout kernels vs the numpy fallback.

Run: python benchmarks/bench_kernels.py [episodes]
Both backends consume identical pre-drawn uniforms and must agree bitwise;
the benchmark asserts that before timing.
"""

from __future__ import annotations

import sys
import time

import numpy as np

from gems import kernels
from gems.games.deceptive import MEANS, PERMS


def timed(fn, *args, repeats=5):
    fn(*args)  # warm-up (and jit compile)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def random_table(rng, rows, cols):
    t = rng.random((rows, cols)) + 1e-3
    return t / t.sum(axis=1, keepdims=True)


def main():
    episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    rng = np.random.default_rng(0)
    cases = []

    payoff = rng.normal(size=(3, 3))
    p = random_table(rng, 1, 3)[0]
    q = random_table(rng, 1, 3)[0]
    u2 = rng.random((episodes, 2))
    cases.append(("matrix", kernels._matrix_numpy, (payoff, p, q, u2), "_matrix_kernel"))

    t1 = random_table(rng, 12, 2)
    t2 = random_table(rng, 12, 2)
    u4 = rng.random((episodes, 4))
    cases.append(("kuhn", kernels._kuhn_numpy, (t1, t2, u4), "_kuhn_kernel"))

    s = random_table(rng, 4, 4)
    r = random_table(rng, 4, 4)
    cases.append(("deceptive", kernels._deceptive_numpy, (s, r, PERMS, MEANS, u4), "_deceptive_kernel"))

    coop = rng.random(5)
    u5 = rng.random((episodes, 5))
    cases.append(("pgg", kernels._pgg_numpy, (coop, 1.6, 1.0, u5), "_pgg_kernel"))

    print(f"backend active: {kernels.BACKEND}; episodes per batch: {episodes}")
    header = f"{'game':<10} {'numpy s':>10} {'numba s':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, numpy_fn, args, jit_name in cases:
        t_numpy = timed(numpy_fn, *args)
        if kernels.HAS_NUMBA:
            jit_fn = getattr(kernels, jit_name)
            ref = numpy_fn(*args)
            got = jit_fn(*args)
            for a, b in zip(ref, got):
                assert np.array_equal(a, b), f"{name}: backends disagree"
            t_numba = timed(jit_fn, *args)
            print(f"{name:<10} {t_numpy:>10.4f} {t_numba:>10.4f} {t_numpy / t_numba:>7.1f}x")
        else:
            print(f"{name:<10} {t_numpy:>10.4f} {'n/a':>10} {'n/a':>8}")


if __name__ == "__main__":
    main()
