"""Independent brute-force oracles used to freeze expected values.

Everything here deliberately avoids the library's kernels and metric
code: argmax/top-k selection is explicit enumeration over pairs, the
fusion is the textbook softmax formula, AUC counts positive/negative
pairs one by one and AP walks the ranking. Keep it that way.
"""
from __future__ import annotations

import math

import numpy as np


def argmax_selection(queries: np.ndarray, pool: np.ndarray):
    """For each query row, the pool row with the largest dot product.

    Every (query, candidate) pair is evaluated; ties resolve to the
    lower pool index by an explicit scan. Returns (indices, sims).
    """
    pool = np.asarray(pool, dtype=np.float64)
    indices, sims = [], []
    for q in np.asarray(queries, dtype=np.float64):
        row = pool @ q
        best_j, best_s = 0, -math.inf
        for j, s in enumerate(row.tolist()):
            if s > best_s:
                best_j, best_s = j, s
        indices.append(best_j)
        sims.append(best_s)
    return indices, sims


def topk_selection(query: np.ndarray, pool: np.ndarray, k: int):
    """Indices of the k largest dot products, ties toward lower index."""
    row = (np.asarray(pool, dtype=np.float64) @ np.asarray(query, np.float64)).tolist()
    order = sorted(range(len(row)), key=lambda j: (-row[j], j))
    return order[: min(k, len(row))]


def softmax_fusion(similarities, scores) -> float:
    """Plain evaluation of the exp-weighted average."""
    weights = [math.exp(s) for s in similarities]
    total = sum(weights)
    return sum(w * a for w, a in zip(weights, scores)) / total


def refine_all(snippets, summaries, scores, k):
    """Full similarity matrix plus explicit softmax, frame by frame."""
    snippets = np.asarray(snippets, dtype=np.float64)
    summaries = np.asarray(summaries, dtype=np.float64)
    refined = []
    for i in range(snippets.shape[0]):
        neighbors = topk_selection(snippets[i], summaries, k)
        sims = [float(np.dot(snippets[i], summaries[j])) for j in neighbors]
        refined.append(softmax_fusion(sims, [scores[j] for j in neighbors]))
    return refined


def pairwise_auc(scores, labels) -> float:
    """Mann-Whitney by explicit pair counting, half credit for ties."""
    scores = list(map(float, scores))
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    if not pos or not neg:
        raise ValueError("need both classes")
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def precision_at_positives_ap(scores, labels) -> float:
    """AP as mean precision at each positive's rank (stable descending sort)."""
    order = sorted(range(len(scores)), key=lambda i: (-float(scores[i]), i))
    hits = 0
    total = 0.0
    for rank, i in enumerate(order, start=1):
        if labels[i] == 1:
            hits += 1
            total += hits / rank
    if hits == 0:
        raise ValueError("need at least one positive")
    return total / hits


def two_prompt_softmax(sim_anomalous: float, sim_normal: float) -> float:
    return math.exp(sim_anomalous) / (math.exp(sim_anomalous) + math.exp(sim_normal))
