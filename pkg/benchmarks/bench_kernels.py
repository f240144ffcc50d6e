"""Benchmark the compiled similarity kernels against the numpy fallback.

The compiled kernels stream the candidate pool with O(n*k) state; the
numpy fallback materializes blocked similarity matrices. Run:

    python benchmarks/bench_kernels.py --frames 2000 --dim 256 --k 10
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from vadkit.kernels import _reference

try:
    from vadkit.kernels import _fused
except ImportError:
    _fused = None


def _unit_rows(rng, n, d):
    m = rng.standard_normal((n, d))
    return np.ascontiguousarray(m / np.linalg.norm(m, axis=1, keepdims=True))


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=2000)
    parser.add_argument("--dim", type=int, default=256)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    queries = _unit_rows(rng, args.frames, args.dim)
    pool = _unit_rows(rng, args.frames, args.dim)

    rows = []
    for name, fn in (
        ("argmax_dot", lambda impl: impl.argmax_dot(queries, pool)),
        ("topk_dot", lambda impl: impl.topk_dot(queries, pool, args.k)),
    ):
        numpy_s = _time(lambda: fn(_reference), args.repeats)
        if _fused is not None:
            compiled_s = _time(lambda: fn(_fused), args.repeats)
            ref_idx = fn(_reference)[0]
            fus_idx = fn(_fused)[0]
            agree = np.array_equal(ref_idx, fus_idx)
            rows.append((name, numpy_s, compiled_s, numpy_s / compiled_s, agree))
        else:
            rows.append((name, numpy_s, None, None, True))

    print(f"frames={args.frames} dim={args.dim} k={args.k}")
    print(f"{'kernel':<12} {'numpy (s)':>10} {'compiled (s)':>13} {'speedup':>8}  agree")
    for name, numpy_s, compiled_s, speedup, agree in rows:
        if compiled_s is None:
            print(f"{name:<12} {numpy_s:>10.4f} {'(not built)':>13} {'-':>8}")
        else:
            print(
                f"{name:<12} {numpy_s:>10.4f} {compiled_s:>13.4f} "
                f"{speedup:>7.2f}x  {agree}"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
