"""Shared domain types plus the frame-sampling and labeling primitives.

Conventions used everywhere downstream: frame indices are 0-based, the
timestamp of frame ``i`` is ``i / fps`` seconds, and embeddings are
L2-normalized at ingestion so cosine similarity reduces to a dot product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

UNIT_NORM_TOL = 1e-4

#: The discrete anomaly scores the LLM is asked to choose from.
SCORE_LEVELS: Tuple[float, ...] = tuple(k / 10 for k in range(11))


class VadError(Exception):
    """Base class for all engine errors."""


class ConfigError(VadError):
    """Invalid or inconsistent configuration."""


class AnnotationError(VadError):
    """Ground-truth annotations are malformed or out of range."""


class MetricUndefinedError(VadError):
    """A metric was requested on inputs where it has no value."""


@dataclass(frozen=True)
class VideoMeta:
    video_id: str
    num_frames: int
    fps: float

    def __post_init__(self):
        if not self.video_id:
            raise ValueError("video_id must be nonempty")
        if self.num_frames < 1:
            raise ValueError(f"{self.video_id}: num_frames must be >= 1")
        if not math.isfinite(self.fps) or self.fps <= 0:
            raise ValueError(f"{self.video_id}: fps must be finite and > 0")

    @property
    def duration_s(self) -> float:
        """Timestamp of the last frame."""
        return (self.num_frames - 1) / self.fps

    def frame_time(self, frame_index: int) -> float:
        return frame_index / self.fps


@dataclass(frozen=True)
class SampledSequence:
    """The stride-decimated lattice of frames everything else is computed on."""

    video_id: str
    stride: int
    indices: Tuple[int, ...]

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if not self.indices or self.indices[0] != 0:
            raise ValueError("lattice must start at frame 0")
        diffs = [b - a for a, b in zip(self.indices, self.indices[1:])]
        if any(d != self.stride for d in diffs[:-1]) or (
            diffs and not 0 < diffs[-1] <= self.stride
        ):
            raise ValueError("lattice spacing must equal the stride")

    def __len__(self) -> int:
        return len(self.indices)

    def position_of(self, frame_index: int) -> int:
        try:
            return self.indices.index(frame_index)
        except ValueError:
            raise ValueError(
                f"frame {frame_index} is not on the sampled lattice"
            ) from None


@dataclass(frozen=True)
class CaptionRecord:
    video_id: str
    frame_index: int
    source_id: str
    text: str

    def __post_init__(self):
        if self.frame_index < 0:
            raise ValueError("frame_index must be >= 0")
        if not self.text.strip():
            raise ValueError(
                f"empty caption for {self.video_id}#{self.frame_index} ({self.source_id})"
            )


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """A unit-norm float32 vector in the shared text/image/video latent space."""

    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.ndim != 1 or v.dtype != np.float32:
            raise ValueError("embedding must be a 1-D float32 array")
        if not np.all(np.isfinite(v)):
            raise ValueError("embedding contains non-finite values")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"embedding norm {norm:.6f} outside 1 +/- {UNIT_NORM_TOL}")
        v.setflags(write=False)

    @classmethod
    def from_raw(cls, values: Sequence[float] | np.ndarray) -> "EmbeddingVector":
        """Normalize arbitrary raw model output into the canonical form."""
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("embedding must be 1-D")
        if not np.all(np.isfinite(v)):
            raise ValueError("embedding contains non-finite values")
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise ValueError("cannot normalize a zero embedding")
        return cls((v / norm).astype(np.float32))

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class TemporalWindow:
    """A clipped time window around a center frame and its sampled members."""

    video_id: str
    center_frame: int
    start_s: float
    end_s: float
    member_frames: Tuple[int, ...]

    def __post_init__(self):
        if self.start_s > self.end_s:
            raise ValueError("window start after end")
        if not self.member_frames:
            raise ValueError("window has no member frames")
        if list(self.member_frames) != sorted(set(self.member_frames)):
            raise ValueError("member frames must be sorted and unique")


@dataclass(frozen=True)
class ScoreSeries:
    """Anomaly scores aligned to the sampled lattice of one video."""

    video_id: str
    frame_indices: Tuple[int, ...]
    initial: Tuple[float, ...]
    refined: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if len(self.initial) != len(self.frame_indices):
            raise ValueError("initial scores misaligned with frame indices")
        for s in self.initial:
            if min(abs(s - lvl) for lvl in SCORE_LEVELS) > 1e-9:
                raise ValueError(f"initial score {s} outside the 11-value set")
        if self.refined is not None:
            if len(self.refined) != len(self.frame_indices):
                raise ValueError("refined scores misaligned with frame indices")
            if any(not 0.0 <= s <= 1.0 for s in self.refined):
                raise ValueError("refined scores must lie in [0, 1]")

    @property
    def final(self) -> Tuple[float, ...]:
        """Refined scores when available, initial otherwise."""
        return self.refined if self.refined is not None else self.initial


@dataclass(frozen=True)
class GroundTruth:
    """Anomalous frame intervals, inclusive on both ends, 0-based."""

    video_id: str
    intervals: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.intervals))
        object.__setattr__(self, "intervals", ordered)
        prev_end = -1
        for start, end in ordered:
            if start < 0 or end < start:
                raise AnnotationError(
                    f"{self.video_id}: bad interval ({start}, {end})"
                )
            if start <= prev_end:
                raise AnnotationError(
                    f"{self.video_id}: overlapping interval ({start}, {end})"
                )
            prev_end = end


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob that shapes a run.

    Fields that change pipeline outputs participate in the cache
    fingerprint (see cache.config_fingerprint); transport-level settings
    (endpoints, timeouts, concurrency) deliberately do not.
    """

    # sampling and window geometry
    stride: int = 16
    window_seconds: float = 10.0
    frames_per_window: int = 10
    # refinement
    neighbors: int = 10
    # prompt variant
    impersonation: bool = True
    anomaly_prior: bool = False
    # elicitation
    retry_limit: int = 2
    # caption pooling: "ensemble" or "single:<source_id>"
    pooling: str = "ensemble"
    # ablation switches
    skip_cleaning: bool = False
    skip_summary: bool = False
    skip_refinement: bool = False
    # drop consecutive duplicate captions before summarizing
    dedupe_window_captions: bool = False
    # lattice-to-frame expansion: "nearest" or "hold"
    expansion: str = "nearest"
    # run policy
    max_failure_fraction: float = 0.1
    workers: int = 4
    # backends
    embed_dim: int = 64
    captioner_endpoint: str = "mock"
    captioner_models: Tuple[str, ...] = ("cap-a", "cap-b")
    text_encoder_endpoint: str = "mock"
    text_encoder_model: str = "enc-text"
    image_encoder_endpoint: str = "mock"
    image_encoder_model: str = "enc-image"
    video_encoder_endpoint: str = "mock"
    video_encoder_model: str = "enc-video"
    llm_endpoint: str = "mock"
    llm_model: str = "llm"
    llm_temperature: float = 0.0
    llm_max_tokens: int = 512
    timeout_s: float = 30.0
    max_inflight: int = 4
    transport_retries: int = 3
    backoff_base_s: float = 0.25

    def __post_init__(self):
        if self.stride < 1:
            raise ConfigError("stride must be >= 1")
        if self.window_seconds <= 0:
            raise ConfigError("window_seconds must be > 0")
        if self.frames_per_window < 1:
            raise ConfigError("frames_per_window must be >= 1")
        if self.neighbors < 1:
            raise ConfigError("neighbors must be >= 1")
        if self.retry_limit < 0:
            raise ConfigError("retry_limit must be >= 0")
        if self.expansion not in ("nearest", "hold"):
            raise ConfigError(f"unknown expansion mode {self.expansion!r}")
        if self.pooling != "ensemble" and not self.pooling.startswith("single:"):
            raise ConfigError(f"unknown pooling mode {self.pooling!r}")
        if not self.captioner_models:
            raise ConfigError("at least one captioner model is required")

    @property
    def primary_source(self) -> str:
        """Captioner source used for raw-caption fallbacks and single pooling."""
        if self.pooling.startswith("single:"):
            return self.pooling.split(":", 1)[1]
        return self.captioner_models[0]

    @property
    def pool_sources(self) -> Tuple[str, ...]:
        if self.pooling == "ensemble":
            return self.captioner_models
        source = self.primary_source
        if source not in self.captioner_models:
            raise ConfigError(f"pooling source {source!r} not among captioner models")
        return (source,)


def sample_frames(meta: VideoMeta, stride: int) -> SampledSequence:
    """Decimate a video to frames 0, stride, 2*stride, ... below num_frames."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    indices = tuple(range(0, meta.num_frames, stride))
    return SampledSequence(video_id=meta.video_id, stride=stride, indices=indices)


def labels_from_intervals(gt: GroundTruth, num_frames: int) -> np.ndarray:
    """Binary per-frame labels: 1 inside any anomalous interval, else 0."""
    labels = np.zeros(num_frames, dtype=np.int8)
    for start, end in gt.intervals:
        if end >= num_frames:
            raise AnnotationError(
                f"{gt.video_id}: interval ({start}, {end}) exceeds "
                f"{num_frames} frames"
            )
        labels[start : end + 1] = 1
    return labels
