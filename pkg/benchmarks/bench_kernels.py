"""Compare the compiled and pure-Python RK4 kernels.

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]

Prints one row per kernel and backend with the best wall time, the
speedup, and the largest difference between the two results.
"""
import argparse
import time

import numpy as np

from twocross.kernels import _pykernels

try:
    from twocross.kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(steps):
    rng = np.random.default_rng(0)
    a, b, c = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4), np.ones(4)
    x0 = np.array([0.3, -0.2, 0.0])
    yield ("regularized (identity)", "rk4_regularized_constant", (a, b, c, 0.05, 0.05, False, x0, 1e-3, steps))
    yield ("regularized (cubic)", "rk4_regularized_constant", (a, b, c, 0.05, 0.05, True, x0, 1e-3, steps))
    # x' = xy + 2, y' = xy - y + 1: bounded orbits around the focus (2, -1)
    coeffs = np.array([2, 0, 0, 0, 1, 0, 1, 0, -1, 0, 1, 0], dtype=float)
    yield ("quadratic", "rk4_quadratic", (coeffs, np.array([2.05, -1.0]), 1e-3, steps, 1e6))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'kernel':<26}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max diff':>11}")
    for label, name, kargs in cases(args.steps):
        tp, outp = best_time(lambda: getattr(_pykernels, name)(*kargs), args.repeat)
        if _ckernels is None:
            print(f"{label:<26}{tp:>12.4f}{'n/a':>12}")
            continue
        tc, outc = best_time(lambda: getattr(_ckernels, name)(*kargs), args.repeat)
        diff = float(np.max(np.abs(outp - outc)))
        print(f"{label:<26}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
