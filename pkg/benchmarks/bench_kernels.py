"""Throughput comparison of the two RBF kernel backends.

Times the 2-D and 1-D basis kernels (forward and backward) at a few
training-representative shapes and prints numpy vs numba side by side.
The numba functions get one untimed warmup call so JIT compilation never
lands inside a measurement; reported numbers are the median of repeats.

Run from the repository root:

    python benchmarks/bench_kernels.py [--repeats 9] [--batch 256]
"""

import argparse
import statistics
import time

import numpy as np

from cvkan.kernels import select_backend

SHAPES = [
    # (features, grid points) as used by the shipped experiment suites
    (1, 8),
    (3, 8),
    (15, 8),
    (6, 64),
]


def _inputs(n, p, g, seed):
    rng = np.random.default_rng(seed)
    xr = rng.uniform(-2.0, 2.0, (n, p))
    xi = rng.uniform(-2.0, 2.0, (n, p))
    axis = np.linspace(-2.0, 2.0, g)
    dk = rng.normal(size=(n, p * g * g))
    dk1 = rng.normal(size=(n, p * g))
    return xr, xi, axis, dk, dk1


def _median_ms(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times)


def bench(n, repeats):
    numpy_be = select_backend("numpy")
    try:
        numba_be = select_backend("numba")
    except ImportError:
        numba_be = None
        print("numba not importable; timing the numpy backend only\n")

    header = f"{'kernel':<26} {'shape':<14} {'numpy ms':>9} {'numba ms':>9} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for p, g in SHAPES:
        xr, xi, axis, dk, dk1 = _inputs(n, p, g, seed=p * 1000 + g)
        k2 = numpy_be.rbf2d_basis(xr, xi, axis, axis, 1.0)
        k1 = numpy_be.rbf1d_basis(xr, axis, 1.0)
        cases = [
            ("rbf2d_basis", lambda be: be.rbf2d_basis(xr, xi, axis, axis, 1.0)),
            ("rbf2d_basis_bwd", lambda be: be.rbf2d_basis_bwd(dk, k2, xr, xi, axis, axis, 1.0)),
            ("rbf1d_basis", lambda be: be.rbf1d_basis(xr, axis, 1.0)),
            ("rbf1d_basis_bwd", lambda be: be.rbf1d_basis_bwd(dk1, k1, xr, axis, 1.0)),
        ]
        for name, call in cases:
            t_np = _median_ms(lambda: call(numpy_be), repeats)
            if numba_be is None:
                print(f"{name:<26} {f'({n},{p}) G={g}':<14} {t_np:>9.3f} {'-':>9} {'-':>8}")
                continue
            call(numba_be)  # warmup / compile
            t_nb = _median_ms(lambda: call(numba_be), repeats)
            print(f"{name:<26} {f'({n},{p}) G={g}':<14} {t_np:>9.3f} {t_nb:>9.3f} "
                  f"{t_np / t_nb:>7.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=256, help="rows per call")
    ap.add_argument("--repeats", type=int, default=9, help="timed repeats (median)")
    args = ap.parse_args()
    bench(args.batch, args.repeats)


if __name__ == "__main__":
    main()
