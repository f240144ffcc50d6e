"""Video-text score refinement.

Each frame's score becomes the softmax-weighted average of the initial
scores of the K temporal summaries whose text embeddings are closest to
the frame's video-snippet embedding. The candidate set spans the whole
video, the frame itself included, and the softmax runs on raw cosine
similarities (no temperature).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .core import EmbeddingVector, UNIT_NORM_TOL


@dataclass(frozen=True)
class RefinementInputs:
    """Aligned per-lattice-frame inputs for one video."""

    snippet_matrix: np.ndarray  # (m, d) float32, unit rows
    summary_matrix: np.ndarray  # (m, d) float32, unit rows
    initial: Tuple[float, ...]
    k: int

    def __post_init__(self):
        m = len(self.initial)
        if self.snippet_matrix.shape[0] != m or self.summary_matrix.shape[0] != m:
            raise ValueError("embeddings misaligned with initial scores")
        if self.snippet_matrix.shape[1] != self.summary_matrix.shape[1]:
            raise ValueError("snippet and summary embedding dims differ")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for matrix in (self.snippet_matrix, self.summary_matrix):
            norms = np.linalg.norm(np.asarray(matrix, dtype=np.float64), axis=1)
            if m and np.max(np.abs(norms - 1.0)) > UNIT_NORM_TOL:
                raise ValueError("embeddings must be unit-norm")

    @classmethod
    def from_vectors(
        cls,
        snippets: Sequence[EmbeddingVector],
        summaries: Sequence[EmbeddingVector],
        initial: Sequence[float],
        k: int,
    ) -> "RefinementInputs":
        return cls(
            snippet_matrix=np.stack([e.values for e in snippets]),
            summary_matrix=np.stack([e.values for e in summaries]),
            initial=tuple(initial),
            k=k,
        )

    def __len__(self) -> int:
        return len(self.initial)


def softmax_weighted_mean(
    similarities: Sequence[float], scores: Sequence[float]
) -> float:
    """exp-similarity weighted average, computed with max-shifted exponents."""
    sims = np.asarray(similarities, dtype=np.float64)
    vals = np.asarray(scores, dtype=np.float64)
    if sims.shape != vals.shape or sims.size == 0:
        raise ValueError("similarities and scores must be nonempty and aligned")
    weights = np.exp(sims - np.max(sims))
    return float(np.dot(weights, vals) / np.sum(weights))


def top_k_summaries(i: int, inputs: RefinementInputs) -> Tuple[int, ...]:
    """Indices of the min(k, m) summaries most similar to snippet i."""
    idx, _ = kernels.topk_dot(
        inputs.snippet_matrix[i], inputs.summary_matrix, inputs.k
    )
    return tuple(int(j) for j in idx[0])


def refine(
    inputs: RefinementInputs,
    candidate_mask: Optional[Sequence[bool]] = None,
) -> Tuple[float, ...]:
    """Refined scores for every frame of the video.

    ``candidate_mask`` marks frames eligible as neighbors (all frames by
    default); frames masked out keep their initial score and never serve
    as neighbors, which is the degraded mode used when some refinement
    embedding permanently failed.
    """
    m = len(inputs)
    scores = np.asarray(inputs.initial, dtype=np.float64)
    if candidate_mask is None:
        mask = np.ones(m, dtype=bool)
    else:
        mask = np.asarray(candidate_mask, dtype=bool)
        if mask.shape != (m,):
            raise ValueError("candidate mask misaligned with inputs")

    candidates = np.flatnonzero(mask)
    refined = scores.copy()
    if candidates.size == 0:
        return tuple(refined.tolist())

    idx, sims = kernels.topk_dot(
        inputs.snippet_matrix[mask],
        inputs.summary_matrix[candidates],
        inputs.k,
    )
    neighbor_scores = scores[candidates[idx]]
    shifted = np.exp(sims - sims.max(axis=1, keepdims=True))
    refined[mask] = (shifted * neighbor_scores).sum(axis=1) / shifted.sum(axis=1)
    return tuple(refined.tolist())
