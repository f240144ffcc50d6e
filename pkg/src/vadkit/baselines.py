"""Zero-shot two-prompt baseline: softmax over cosine similarities.

Frame mode scores image embeddings, video mode scores snippet
embeddings; the math is identical, only the embedding source differs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConfigError, EmbeddingVector

NORMAL_PROMPT = "a standard scene"
ANOMALOUS_PROMPT = "a scene with suspicious or potentially criminal activities"


@dataclass(frozen=True)
class PromptPair:
    normal_text: str
    anomalous_text: str
    normal_embedding: EmbeddingVector
    anomalous_embedding: EmbeddingVector

    def __post_init__(self):
        if self.normal_embedding.dim != self.anomalous_embedding.dim:
            raise ConfigError("prompt embeddings have mismatched dims")

    @classmethod
    def from_encoder(
        cls,
        text_encoder,
        normal_text: str = NORMAL_PROMPT,
        anomalous_text: str = ANOMALOUS_PROMPT,
    ) -> "PromptPair":
        return cls(
            normal_text=normal_text,
            anomalous_text=anomalous_text,
            normal_embedding=text_encoder.embed_text(normal_text),
            anomalous_embedding=text_encoder.embed_text(anomalous_text),
        )


def zs_two_prompt_score(item: EmbeddingVector, pair: PromptPair) -> float:
    """Anomaly probability from a two-way softmax of cosine similarities."""
    if item.dim != pair.normal_embedding.dim:
        raise ConfigError(
            f"item embedding dim {item.dim} does not match prompt dim "
            f"{pair.normal_embedding.dim}"
        )
    s_anom = float(item.values @ pair.anomalous_embedding.values)
    s_norm = float(item.values @ pair.normal_embedding.values)
    # e^a / (e^a + e^n), computed in the numerically safe sigmoid form
    return 1.0 / (1.0 + math.exp(s_norm - s_anom))


def run_zs_baseline(manifest, config, modality: str):
    """Score every video of a manifest with the two-prompt baseline.

    Returns a report dict with frame-level metrics (None when the
    manifest carries no annotations) and the per-video lattice scores.
    """
    from .cache import config_fingerprint
    from .core import GroundTruth, labels_from_intervals, sample_frames
    from .evaluation import (
        MetricUndefinedError,
        average_precision,
        expand_lattice,
        roc_auc,
    )
    from .manifest import ingest_annotations
    from .mock_backends import MockWorld
    from .pipeline import build_backends
    from .summary import build_window

    if modality not in ("image", "video"):
        raise ConfigError(f"zs baseline modality must be image|video, got {modality!r}")

    world = (
        MockWorld.from_file(manifest.mock_world_path)
        if manifest.mock_world_path
        else MockWorld()
    )
    backends = build_backends(config, world)
    pair = PromptPair.from_encoder(backends.text_encoder)

    ground_truth = (
        ingest_annotations(manifest.annotations_path, manifest.annotation_format)
        if manifest.annotations_path
        else None
    )

    per_video = {}
    all_scores, all_labels = [], []
    for meta in manifest.videos:
        lattice = sample_frames(meta, config.stride)
        values = []
        for frame_index in lattice.indices:
            if modality == "image":
                ref = manifest.frame_ref(meta.video_id, frame_index)
                emb = backends.image_encoder.embed_image(ref)
            else:
                window = build_window(
                    frame_index, meta, lattice,
                    config.window_seconds, config.frames_per_window,
                )
                emb = backends.video_encoder.embed_video(
                    window, manifest.snippet_root(meta.video_id)
                )
            values.append(zs_two_prompt_score(emb, pair))
        per_video[meta.video_id] = {
            "frame_indices": list(lattice.indices),
            "scores": values,
        }
        expanded = expand_lattice(
            lattice.indices, values, meta.num_frames, config.expansion
        )
        if ground_truth is not None:
            gt = ground_truth.get(
                meta.video_id, GroundTruth(video_id=meta.video_id, intervals=())
            )
            all_scores.append(expanded)
            all_labels.append(labels_from_intervals(gt, meta.num_frames))

    auc = ap = None
    if ground_truth is not None:
        scores = np.concatenate(all_scores)
        labels = np.concatenate(all_labels)
        try:
            auc = roc_auc(scores, labels)
        except MetricUndefinedError:
            pass
        try:
            ap = average_precision(scores, labels)
        except MetricUndefinedError:
            pass

    return {
        "baseline": f"zs_{modality}",
        "config_fingerprint": config_fingerprint(config),
        "roc_auc": auc,
        "average_precision": ap,
        "num_videos": len(manifest.videos),
        "per_video": per_video,
    }
