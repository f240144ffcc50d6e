"""Frame-level evaluation: score expansion, ROC AUC, AP, detections.

Both metrics are computed exactly from rank statistics rather than by
integrating sampled curves: AUC is the tie-aware Mann-Whitney statistic,
AP is precision summed at the rank of every positive with ties ordered
by original index. Scores from all test videos are concatenated before
metric computation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import MetricUndefinedError, ScoreSeries, VideoMeta


def expand_lattice(
    frame_indices: Sequence[int],
    values: Sequence[float],
    num_frames: int,
    mode: str = "nearest",
) -> np.ndarray:
    """Spread lattice scores to all frames of a video.

    "nearest" assigns each frame the score of the closest lattice frame
    (exact midpoints take the earlier one); "hold" keeps the score of the
    latest lattice frame at or before each frame.
    """
    lattice = np.asarray(frame_indices, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    if lattice.size == 0 or lattice.shape != values.shape:
        raise ValueError("lattice and values must be nonempty and aligned")
    if lattice[-1] >= num_frames:
        raise ValueError("lattice extends past the end of the video")

    frames = np.arange(num_frames, dtype=np.int64)
    if mode == "hold":
        pos = np.searchsorted(lattice, frames, side="right") - 1
        return values[np.clip(pos, 0, len(lattice) - 1)]
    if mode != "nearest":
        raise ValueError(f"unknown expansion mode {mode!r}")
    right = np.searchsorted(lattice, frames, side="left")

    left = np.clip(right - 1, 0, len(lattice) - 1)
    right = np.clip(right, 0, len(lattice) - 1)
    dist_left = np.abs(frames - lattice[left])
    dist_right = np.abs(lattice[right] - frames)
    pos = np.where(dist_left <= dist_right, left, right)  # tie -> earlier
    return values[pos]


def expand_scores(
    series: ScoreSeries, meta: VideoMeta, mode: str = "nearest"
) -> np.ndarray:
    """Per-frame scores for a whole video from its lattice-aligned series."""
    if series.video_id != meta.video_id:
        raise ValueError("score series and metadata describe different videos")
    return expand_lattice(series.frame_indices, series.final, meta.num_frames, mode)


def _validate_metric_inputs(scores, labels):
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 1 or s.shape != y.shape:
        raise ValueError("scores and labels must be 1-D and aligned")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be binary")
    return s, y.astype(np.int8)


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """P(random positive outscores random negative), half credit for ties."""
    s, y = _validate_metric_inputs(scores, labels)
    n_pos = int(y.sum())
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise MetricUndefinedError("ROC AUC needs both classes present")

    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s), dtype=np.float64)
    sorted_scores = s[order]
    # average ranks within each tie group (1-based ranks)
    boundaries = np.flatnonzero(np.diff(sorted_scores)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(s)]))
    for a, b in zip(starts, ends):
        ranks[order[a:b]] = (a + 1 + b) / 2
    rank_sum = float(ranks[y == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


def average_precision(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Precision summed at every positive's rank, divided by the positive count.

    Ranking is by descending score; tied scores keep their original index
    order, so results are reproducible and stable under infinitesimal
    tie-breaking perturbations that preserve index order.
    """
    s, y = _validate_metric_inputs(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise MetricUndefinedError("AP needs at least one positive")

    order = np.argsort(-s, kind="stable")
    hits = y[order] == 1
    cum_pos = np.cumsum(hits)
    ranks = np.arange(1, len(s) + 1)
    return float((cum_pos[hits] / ranks[hits]).sum() / n_pos)


def threshold_detections(
    scores: Sequence[float], threshold: float
) -> List[Tuple[int, int]]:
    """Maximal runs of frames with score >= threshold, inclusive intervals."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    s = np.asarray(scores, dtype=np.float64)
    above = s >= threshold
    intervals: List[Tuple[int, int]] = []
    start = None
    for i, flag in enumerate(above):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            intervals.append((start, i - 1))
            start = None
    if start is not None:
        intervals.append((start, len(s) - 1))
    return intervals


@dataclass(frozen=True)
class EvaluationReport:
    dataset: str
    config_fingerprint: str
    roc_auc: Optional[float]
    average_precision: Optional[float]
    num_videos: int
    num_frames: int
    per_video: Dict[str, dict] = field(default_factory=dict)
    flags: Dict[str, List[str]] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "dataset": self.dataset,
            "config_fingerprint": self.config_fingerprint,
            "roc_auc": self.roc_auc,
            "average_precision": self.average_precision,
            "num_videos": self.num_videos,
            "num_frames": self.num_frames,
            "per_video": self.per_video,
            "flags": self.flags,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
