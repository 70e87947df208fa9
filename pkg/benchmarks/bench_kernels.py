"""Benchmark the numba kernels against the pure-numpy fallback.

Run: python3 benchmarks/bench_kernels.py [--qubits 20] [--table-bits 8] [--runs 5]

Times the dual-path hot kernels on a random statevector. The same arrays go
through both backends, so the speedup column is a like-for-like comparison.
"""

import argparse
import time

import numpy as np

from qnokey._kernels import numpy_impl

try:
    from qnokey._kernels import numba_impl
except ImportError:
    numba_impl = None


def time_fn(fn, args, runs, warmup=2):
    for _ in range(warmup):
        fn(*args)
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return np.mean(times) * 1e3, np.std(times) * 1e3


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, default=20, help="statevector size (2^qubits)")
    parser.add_argument("--table-bits", type=int, default=8, help="oracle input register width")
    parser.add_argument("--runs", type=int, default=5)
    args = parser.parse_args()

    if numba_impl is None:
        print("numba is not importable; nothing to compare")
        return

    n = args.qubits
    k = args.table_bits
    rng = np.random.default_rng(0)
    amp = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amp = np.ascontiguousarray(amp / np.linalg.norm(amp))
    table = rng.integers(0, 1 << k, size=1 << k).astype(np.int64)
    perm = rng.permutation(1 << k).astype(np.int64)
    positions = np.arange(n - k, n, dtype=np.int64)

    cases = [
        ("apply_table_xor", (amp, table, n - k, (1 << k) - 1, 0)),
        ("apply_index_xor", (amp, (1 << k) - 1)),
        ("apply_table_substitute", (amp, perm, n - k, (1 << k) - 1)),
        ("hadamard_register", (amp, positions)),
        ("zero_probability", (amp, 0, k)),
        ("register_probs", (amp, 0, k)),
    ]

    print(f"statevector: 2^{n} amplitudes ({(1 << n) * 16 / 1e6:.1f} MB), "
          f"register width {k}, {args.runs} timed runs")
    print(f"{'kernel':<24} {'numpy (ms)':>16} {'numba (ms)':>16} {'speedup':>9}")
    for name, call_args in cases:
        np_mean, np_std = time_fn(getattr(numpy_impl, name), call_args, args.runs)
        nb_mean, nb_std = time_fn(getattr(numba_impl, name), call_args, args.runs)
        speedup = np_mean / nb_mean if nb_mean > 0 else float("inf")
        print(
            f"{name:<24} {np_mean:>9.3f} ± {np_std:<5.3f} "
            f"{nb_mean:>9.3f} ± {nb_std:<5.3f} {speedup:>8.2f}x"
        )


if __name__ == "__main__":
    main()
