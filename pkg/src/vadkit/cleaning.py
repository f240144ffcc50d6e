"""Image-text caption cleaning.

Each sampled frame swaps its raw caption for the caption in the video's
pool whose text embedding best matches the frame's image embedding. The
pool holds every caption of the video: one captioner source in "single"
mode, the union of all sources in "ensemble" mode.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .core import CaptionRecord, EmbeddingVector, SampledSequence, VadError


class PoolError(VadError):
    """A caption pool could not be built."""


@dataclass(frozen=True)
class CaptionPool:
    """Embedded caption candidates for one video, in canonical order.

    Entries are sorted by (frame_index, source_id, text) so that an
    argmax that resolves ties toward the lower matrix row implements the
    content-based tie rule, independent of input order.
    """

    video_id: str
    entries: Tuple[CaptionRecord, ...]
    matrix: np.ndarray  # (len(entries), dim) float32, unit rows

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class CleanedEntry:
    frame_index: int
    caption: CaptionRecord
    similarity: Optional[float]
    cleaned: bool


@dataclass(frozen=True)
class CleanedCaptions:
    video_id: str
    entries: Tuple[CleanedEntry, ...]

    def text_for(self, frame_index: int) -> str:
        for entry in self.entries:
            if entry.frame_index == frame_index:
                return entry.caption.text
        raise KeyError(frame_index)

    def as_dict(self) -> dict:
        return {e.frame_index: e for e in self.entries}


def build_pool(captions: Sequence[CaptionRecord], text_encoder) -> CaptionPool:
    """Embed and index a video's captions; duplicate texts share one embedding."""
    if not captions:
        raise PoolError("cannot build a caption pool from zero captions")
    video_ids = {c.video_id for c in captions}
    if len(video_ids) != 1:
        raise PoolError(f"pool must cover exactly one video, got {sorted(video_ids)}")

    ordered = sorted(captions, key=lambda c: (c.frame_index, c.source_id, c.text))
    by_text: dict[str, EmbeddingVector] = {}
    for record in ordered:
        if record.text not in by_text:
            by_text[record.text] = text_encoder.embed_text(record.text)
    matrix = np.stack([by_text[c.text].values for c in ordered])
    return CaptionPool(video_id=video_ids.pop(), entries=tuple(ordered), matrix=matrix)


def clean_captions(
    frames: SampledSequence,
    image_embeddings: Mapping[int, Optional[EmbeddingVector]],
    pool: CaptionPool,
) -> CleanedCaptions:
    """Pick each frame's semantically closest pool caption.

    Frames without an image embedding keep their own raw caption (the
    lowest-ranked pool entry for that frame) and are flagged uncleaned.
    """
    if len(pool) == 0:
        raise PoolError(f"{frames.video_id}: empty caption pool")

    with_emb = [
        f for f in frames.indices if image_embeddings.get(f) is not None
    ]
    chosen: dict[int, CleanedEntry] = {}
    if with_emb:
        queries = np.stack([image_embeddings[f].values for f in with_emb])
        best_idx, best_sim = kernels.argmax_dot(queries, pool.matrix)
        for f, j, s in zip(with_emb, best_idx, best_sim):
            chosen[f] = CleanedEntry(
                frame_index=f,
                caption=pool.entries[int(j)],
                similarity=float(s),
                cleaned=True,
            )

    for f in frames.indices:
        if f in chosen:
            continue
        own = next((c for c in pool.entries if c.frame_index == f), None)
        chosen[f] = CleanedEntry(
            frame_index=f,
            caption=own if own is not None else pool.entries[0],
            similarity=None,
            cleaned=False,
        )

    entries = tuple(chosen[f] for f in frames.indices)
    return CleanedCaptions(video_id=frames.video_id, entries=entries)
