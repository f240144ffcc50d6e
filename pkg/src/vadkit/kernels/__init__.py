"""Similarity kernels behind the cleaning and refinement stages.

The compiled extension is preferred when it was built; otherwise the
numpy implementation is used. Set VADKIT_PURE_KERNELS=1 to force the
fallback (the benchmark and the cross-checking tests do this).
"""
from __future__ import annotations

import os

import numpy as np

if os.environ.get("VADKIT_PURE_KERNELS") == "1":
    from . import _reference as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _fused as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _reference as _impl

        BACKEND = "numpy"


def _as_matrix(x) -> np.ndarray:
    m = np.ascontiguousarray(x, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ValueError("expected a 2-D embedding matrix")
    return m


def argmax_dot(queries, pool):
    """Index and value of the best-matching pool row for every query row."""
    q, p = _as_matrix(queries), _as_matrix(pool)
    if p.shape[0] == 0:
        raise ValueError("empty pool")
    if q.shape[1] != p.shape[1]:
        raise ValueError("dimension mismatch between queries and pool")
    return _impl.argmax_dot(q, p)


def topk_dot(queries, pool, k: int):
    """Top-min(k, len(pool)) pool rows per query, ties toward lower index."""
    q, p = _as_matrix(queries), _as_matrix(pool)
    if p.shape[0] == 0:
        raise ValueError("empty pool")
    if q.shape[1] != p.shape[1]:
        raise ValueError("dimension mismatch between queries and pool")
    if k < 1:
        raise ValueError("k must be >= 1")
    return _impl.topk_dot(q, p, min(k, p.shape[0]))
