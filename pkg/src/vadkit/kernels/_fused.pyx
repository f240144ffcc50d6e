# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled similarity kernels.

Streaming counterparts of kernels._reference: the pool is scanned row
by row with O(n*k) selection state instead of materializing n x m
similarity blocks, so long videos stay in a small memory envelope.
Queries are processed in tiles of four so each pool row loaded from
cache feeds four dot products. Tie-breaking matches the reference
implementation (lowest pool index wins on exact equality).
"""
import numpy as np

DEF TILE = 4


cdef inline void _dot_tile(
    const double* q, Py_ssize_t stride, Py_ssize_t rows,
    const double* p, Py_ssize_t d, double* out
) nogil:
    """out[r] = <queries row r, pool row>, for r < rows (rows <= TILE)."""
    cdef double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0
    cdef double acc
    cdef Py_ssize_t r, t
    if rows == TILE:
        for t in range(d):
            a0 += q[t] * p[t]
            a1 += q[stride + t] * p[t]
            a2 += q[2 * stride + t] * p[t]
            a3 += q[3 * stride + t] * p[t]
        out[0] = a0
        out[1] = a1
        out[2] = a2
        out[3] = a3
    else:
        for r in range(rows):
            acc = 0.0
            for t in range(d):
                acc += q[r * stride + t] * p[t]
            out[r] = acc


def argmax_dot(double[:, ::1] queries, double[:, ::1] pool):
    cdef Py_ssize_t n = queries.shape[0]
    cdef Py_ssize_t m = pool.shape[0]
    cdef Py_ssize_t d = queries.shape[1]
    if pool.shape[1] != d:
        raise ValueError("dimension mismatch between queries and pool")
    if m < 1:
        raise ValueError("empty pool")

    idx_arr = np.zeros(n, dtype=np.int64)
    sim_arr = np.zeros(n, dtype=np.float64)
    cdef long long[::1] best_idx = idx_arr
    cdef double[::1] best_sim = sim_arr

    cdef Py_ssize_t i, j, r, rows
    cdef double sims[TILE]
    cdef double best[TILE]
    cdef long long arg[TILE]
    with nogil:
        i = 0
        while i < n:
            rows = TILE if n - i >= TILE else n - i
            _dot_tile(&queries[i, 0], d, rows, &pool[0, 0], d, best)
            for r in range(rows):
                arg[r] = 0
            for j in range(1, m):
                _dot_tile(&queries[i, 0], d, rows, &pool[j, 0], d, sims)
                for r in range(rows):
                    if sims[r] > best[r]:
                        best[r] = sims[r]
                        arg[r] = j
            for r in range(rows):
                best_sim[i + r] = best[r]
                best_idx[i + r] = arg[r]
            i += rows
    return idx_arr, sim_arr


cdef inline void _topk_insert(
    double* sims, long long* idx, Py_ssize_t k, Py_ssize_t* filled,
    double value, Py_ssize_t j
) nogil:
    """Keep (sims, idx) sorted by (-sim, index); equal sims keep the
    earlier (lower-index) entry ahead and never displace it."""
    cdef Py_ssize_t pos
    if filled[0] < k:
        pos = filled[0]
        while pos > 0 and sims[pos - 1] < value:
            sims[pos] = sims[pos - 1]
            idx[pos] = idx[pos - 1]
            pos -= 1
        sims[pos] = value
        idx[pos] = j
        filled[0] += 1
    elif value > sims[k - 1]:
        pos = k - 1
        while pos > 0 and sims[pos - 1] < value:
            sims[pos] = sims[pos - 1]
            idx[pos] = idx[pos - 1]
            pos -= 1
        sims[pos] = value
        idx[pos] = j


def topk_dot(double[:, ::1] queries, double[:, ::1] pool, Py_ssize_t k):
    cdef Py_ssize_t n = queries.shape[0]
    cdef Py_ssize_t m = pool.shape[0]
    cdef Py_ssize_t d = queries.shape[1]
    if pool.shape[1] != d:
        raise ValueError("dimension mismatch between queries and pool")
    if k > m:
        k = m
    if k < 1:
        raise ValueError("k must be >= 1")

    idx_arr = np.empty((n, k), dtype=np.int64)
    sim_arr = np.empty((n, k), dtype=np.float64)
    cdef long long[:, ::1] out_idx = idx_arr
    cdef double[:, ::1] out_sim = sim_arr

    cdef Py_ssize_t i, j, r, rows
    cdef Py_ssize_t filled[TILE]
    cdef double sims[TILE]
    with nogil:
        i = 0
        while i < n:
            rows = TILE if n - i >= TILE else n - i
            for r in range(rows):
                filled[r] = 0
            for j in range(m):
                _dot_tile(&queries[i, 0], d, rows, &pool[j, 0], d, sims)
                for r in range(rows):
                    # fast reject: most candidates never enter the top-k
                    if filled[r] == k and sims[r] <= out_sim[i + r, k - 1]:
                        continue
                    _topk_insert(
                        &out_sim[i + r, 0], &out_idx[i + r, 0], k,
                        &filled[r], sims[r], j,
                    )
            i += rows
    return idx_arr, sim_arr
