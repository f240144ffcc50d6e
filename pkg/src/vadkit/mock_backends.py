"""Deterministic in-process backends for tests and offline runs.

Every response is a pure function of the request, the model tag and a
fixed seed, so repeated pipeline runs produce bit-identical caches.

A MockWorld makes the mocks behave like a coherent set of models for a
fixture dataset: it declares the "true caption" of each sampled frame,
and the encoders are constructed so that cross-modal similarities line
up with those captions:

  * the image embedding of a frame is the text embedding of its true
    caption plus a small perturbation (norm <= 0.05), so caption
    cleaning provably reselects the true caption;
  * the video embedding of a window is built from the digest the mock
    LLM would produce for that window's captions, so each snippet is
    most similar to its own summary;
  * captions containing a score marker ("SCORE_FIXTURE=<x>") pull their
    text embeddings toward a per-marker cluster direction, keeping
    marked and unmarked content well separated under refinement.

The mock LLM answers summary prompts with a digest of the listed
captions (a single-caption window digests to the caption itself) and
scoring prompts with the highest score marker found in the prompt, or a
hash-derived grid score when no marker is present.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from .backends import BackendDescriptor, FrameRef
from .core import ConfigError, EmbeddingVector, TemporalWindow

SCORE_MARKER = re.compile(r"SCORE_FIXTURE=([0-9]*\.?[0-9]+)")
_NUMBERED_LINE = re.compile(r"^\d+\.\s+")

_CLUSTER_WEIGHT = 0.8
_TEXT_WEIGHT = 0.6
_PERTURBATION = 0.05


def _seed(*parts: object) -> int:
    digest = hashlib.sha256("\x1f".join(map(str, parts)).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def _unit(seed: int, dim: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def summary_digest(captions) -> str:
    """The text the mock LLM returns for a window's caption list."""
    return " ".join(captions)


@dataclass(frozen=True)
class MockWorld:
    """Fixture declarations shared by all mock backends of a run."""

    true_captions: Dict[Tuple[str, int], str] = field(default_factory=dict)
    primary_source: Optional[str] = None

    def true_caption(self, video_id: str, frame_index: int) -> Optional[str]:
        return self.true_captions.get((video_id, frame_index))

    @classmethod
    def from_file(cls, path: Path | str) -> "MockWorld":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        captions = {}
        for video_id, video in payload.get("videos", {}).items():
            for frame, text in video.get("true_captions", {}).items():
                captions[(video_id, int(frame))] = text
        return cls(
            true_captions=captions,
            primary_source=payload.get("primary_source"),
        )

    def to_file(self, path: Path | str) -> None:
        videos: Dict[str, dict] = {}
        for (video_id, frame), text in sorted(self.true_captions.items()):
            videos.setdefault(video_id, {"true_captions": {}})
            videos[video_id]["true_captions"][str(frame)] = text
        payload = {"primary_source": self.primary_source, "videos": videos}
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


class MockBackend:
    """Drop-in replacement for HttpBackend with deterministic behavior."""

    def __init__(self, descriptor: BackendDescriptor, world: Optional[MockWorld] = None):
        self.descriptor = descriptor
        self.world = world or MockWorld()

    def _require_kind(self, kind: str):
        if self.descriptor.kind != kind:
            raise ConfigError(
                f"backend {self.descriptor.model_tag!r} is {self.descriptor.kind}, "
                f"not {kind}"
            )

    # -- captioner ----------------------------------------------------------

    def _caption_text(self, video_id: str, frame_index: int, tag: str) -> str:
        true = self.world.true_caption(video_id, frame_index)
        if true is None:
            return f"a mock scene from {video_id} frame {frame_index} as seen by {tag}"
        primary = self.world.primary_source
        if primary is None or tag == primary:
            return true
        return f"{true} [{tag}]"

    def caption(self, frame: FrameRef) -> str:
        self._require_kind("captioner")
        return self._caption_text(
            frame.video_id, frame.frame_index, self.descriptor.model_tag
        )

    # -- encoders -------------------------------------------------------

    def _dim(self) -> int:
        if not self.descriptor.embed_dim:
            raise ConfigError("mock encoder needs embed_dim")
        return self.descriptor.embed_dim

    def _text_direction(self, text: str) -> np.ndarray:
        """Shared latent direction for a text, common to all encoders."""
        dim = self._dim()
        base = _unit(_seed("text", text), dim)
        markers = SCORE_MARKER.findall(text)
        if not markers:
            return base
        cluster = _unit(_seed("cluster", max(float(m) for m in markers)), dim)
        mixed = _CLUSTER_WEIGHT * cluster + _TEXT_WEIGHT * base
        return mixed / np.linalg.norm(mixed)

    def _perturbed(self, direction: np.ndarray, seed: int) -> EmbeddingVector:
        noise = _PERTURBATION * _unit(seed, direction.shape[0])
        return EmbeddingVector.from_raw(direction + noise)

    def embed_text(self, text: str) -> EmbeddingVector:
        self._require_kind("text_encoder")
        if not text:
            raise ValueError("cannot embed empty text")
        return EmbeddingVector.from_raw(self._text_direction(text))

    def embed_image(self, frame: FrameRef) -> EmbeddingVector:
        self._require_kind("image_encoder")
        basis = self.world.true_caption(frame.video_id, frame.frame_index)
        if basis is None:
            basis = self._caption_text(
                frame.video_id, frame.frame_index, self.descriptor.model_tag
            )
        return self._perturbed(
            self._text_direction(basis),
            _seed("img", frame.video_id, frame.frame_index),
        )

    def embed_video(self, window: TemporalWindow, root: FrameRef) -> EmbeddingVector:
        self._require_kind("video_encoder")
        texts = []
        for member in window.member_frames:
            text = self.world.true_caption(window.video_id, member)
            if text is None:
                text = self._caption_text(
                    window.video_id, member, self.descriptor.model_tag
                )
            texts.append(text)
        return self._perturbed(
            self._text_direction(summary_digest(texts)),
            _seed("vid", window.video_id, window.center_frame),
        )

    # -- llm --------------------------------------------------------------

    def complete(self, prompt: str) -> str:
        self._require_kind("llm")
        if not prompt:
            raise ValueError("prompt must be nonempty")
        from .scoring import FORMAT_PROMPT
        from .summary import SUMMARY_PROMPT

        if prompt.startswith(SUMMARY_PROMPT):
            lines = prompt.split("\n")[1:]
            captions = [_NUMBERED_LINE.sub("", line) for line in lines]
            return summary_digest(captions)
        markers = SCORE_MARKER.findall(prompt)
        if markers:
            return f"[{max(float(m) for m in markers):g}]"
        if FORMAT_PROMPT in prompt:
            return f"[{(_seed('score', prompt) % 11) / 10:g}]"
        return f"mock completion {_seed('free', prompt):016x}"
