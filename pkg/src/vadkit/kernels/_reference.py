"""Pure-numpy similarity kernels (fallback for the compiled extension).

Pool scans are blocked so the full n x m similarity matrix is never
materialized for long videos. Accumulation happens in float64; ties are
always resolved toward the lower pool index so results are reproducible
and match the compiled kernels.
"""
from __future__ import annotations

import numpy as np

_BLOCK_ROWS = 256


def argmax_dot(queries: np.ndarray, pool: np.ndarray):
    """Best pool row per query by dot product.

    Returns (indices int64 (n,), sims float64 (n,)); exact similarity ties
    keep the lowest pool index.
    """
    n, m = queries.shape[0], pool.shape[0]
    best_idx = np.zeros(n, dtype=np.int64)
    best_sim = np.full(n, -np.inf, dtype=np.float64)
    for start in range(0, m, _BLOCK_ROWS):
        block = pool[start : start + _BLOCK_ROWS]
        sims = queries @ block.T
        local = np.argmax(sims, axis=1)  # first max within the block
        local_sim = sims[np.arange(n), local]
        better = local_sim > best_sim  # strict: earlier block wins ties
        best_sim[better] = local_sim[better]
        best_idx[better] = local[better] + start
    return best_idx, best_sim


def topk_dot(queries: np.ndarray, pool: np.ndarray, k: int):
    """Top-k pool rows per query by dot product.

    Returns (indices int64 (n, k'), sims float64 (n, k')) with
    k' = min(k, len(pool)), each row ordered by descending similarity and
    ascending index among ties.
    """
    n, m = queries.shape[0], pool.shape[0]
    k = min(k, m)
    idx = np.empty((n, k), dtype=np.int64)
    sims = np.empty((n, k), dtype=np.float64)
    for start in range(0, n, _BLOCK_ROWS):
        rows = queries[start : start + _BLOCK_ROWS]
        block_sims = rows @ pool.T
        # stable sort of -sims keeps ascending pool index among equal sims
        order = np.argsort(-block_sims, axis=1, kind="stable")[:, :k]
        idx[start : start + rows.shape[0]] = order
        sims[start : start + rows.shape[0]] = np.take_along_axis(
            block_sims, order, axis=1
        )
    return idx, sims
