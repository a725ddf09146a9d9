"""Benchmark: compiled mask kernels vs the pure-Python fallback.

Usage:  python benchmarks/bench_kernels.py [--repeats 5]

Times contour tracing and component labeling on a family of disk masks
and prints per-backend timings plus the speedup. Results are verified to
be identical across backends before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from descshot.kernels import _pure, native


def disk(radius: int) -> np.ndarray:
    span = np.arange(-radius - 2, radius + 3)
    yy, xx = np.meshgrid(span, span, indexing="ij")
    return ((xx * xx + yy * yy) <= radius * radius).astype(np.uint8)


def speckled(size: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return (rng.random((size, size)) < 0.45).astype(np.uint8)


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if native is None:
        print("compiled kernels not built (pip install -e . --no-build-isolation);")
        print("timing the pure backend only")

    cases = [
        ("trace disk r=100", disk(100), "trace"),
        ("trace disk r=500", disk(500), "trace"),
        ("trace disk r=2000", disk(2000), "trace"),
        ("label disk r=200", disk(200), "label"),
        ("label disk r=500", disk(500), "label"),
        ("label speckle 512x512", speckled(512), "label"),
    ]

    header = f"{'case':<24} {'pure':>10} {'native':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, mask, kind in cases:
        if kind == "trace":
            run_pure = lambda: _pure.trace_outer_contour(mask)
            run_native = None if native is None else (
                lambda: native.trace_outer_contour(mask)
            )
        else:
            run_pure = lambda: _pure.label_components(mask)
            run_native = None if native is None else (
                lambda: native.label_components(mask)
            )
        if run_native is not None:
            if kind == "trace":
                assert _pure.trace_outer_contour(mask) == native.trace_outer_contour(mask)
            else:
                cp, lp = _pure.label_components(mask)
                cn, ln = native.label_components(mask)
                assert cp == cn and np.array_equal(lp, ln)
        t_pure = best_of(run_pure, args.repeats)
        if run_native is None:
            print(f"{name:<24} {t_pure * 1e3:>8.2f}ms {'-':>10} {'-':>8}")
        else:
            t_native = best_of(run_native, args.repeats)
            print(
                f"{name:<24} {t_pure * 1e3:>8.2f}ms {t_native * 1e3:>8.2f}ms "
                f"{t_pure / t_native:>7.1f}x"
            )


if __name__ == "__main__":
    main()
