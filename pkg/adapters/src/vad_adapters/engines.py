"""Model engines behind the adapter endpoints.

One process serves one kind. The "builtin" checkpoint family provides
fully deterministic engines that satisfy the wire contract without any
model weights; real checkpoints plug in by registering an engine
factory under a new checkpoint name (see register_engine).
"""
from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

KINDS = ("captioner", "text_encoder", "image_encoder", "video_encoder", "llm")

BUILTIN_CAPTIONER_TAGS = ("cap-a", "cap-b", "cap-c", "cap-d", "cap-e")

_SUBJECTS = (
    "a person", "a delivery van", "a cyclist", "a small crowd", "a dog",
    "two workers", "a security guard", "an empty corridor",
)
_ACTIONS = (
    "walks past", "stands near", "moves toward", "waits beside",
    "crosses", "inspects", "leaves", "lingers by",
)
_PLACES = (
    "the entrance", "a parked car", "the stairwell", "a storefront",
    "the loading dock", "a crosswalk", "the lobby", "a fence",
)


class EngineError(Exception):
    """The engine rejected a request (reported as non-retryable)."""


def _digest(*parts: str) -> int:
    joined = "\x1f".join(parts)
    return int.from_bytes(hashlib.sha256(joined.encode()).digest()[:8], "little")


@dataclass
class CaptionEngine:
    variant: str

    def caption(self, uri: str) -> str:
        seed = _digest("caption", self.variant, uri)
        subject = _SUBJECTS[seed % len(_SUBJECTS)]
        action = _ACTIONS[(seed >> 8) % len(_ACTIONS)]
        place = _PLACES[(seed >> 16) % len(_PLACES)]
        return f"{subject} {action} {place}"


@dataclass
class EmbedEngine:
    dim: int

    def embed(self, modality: str, content: str) -> List[float]:
        values = []
        counter = 0
        while len(values) < self.dim:
            block = hashlib.sha256(
                f"{modality}\x1f{content}\x1f{counter}".encode()
            ).digest()
            values.extend(
                int.from_bytes(block[i : i + 4], "little") / 2**31 - 1.0
                for i in range(0, 32, 4)
            )
            counter += 1
        values = values[: self.dim]
        norm = math.sqrt(sum(v * v for v in values))
        return [v / norm for v in values]


_LIST_INSTRUCTION = re.compile(
    r"begin with '\[' and end with '\]'", re.IGNORECASE
)
_OPTION_LIST = re.compile(r"\[([0-9eE+\-.,\s]+)\]")


@dataclass
class CompletionEngine:
    model_tag: str

    def complete(self, prompt: str, temperature: float, max_tokens: int) -> str:
        seed = _digest("complete", self.model_tag, prompt, f"{temperature:g}")
        # honor bracketed-list format instructions by picking one of the
        # offered options, so structured-output callers can parse us
        if _LIST_INSTRUCTION.search(prompt):
            options_match = _OPTION_LIST.search(prompt)
            if options_match:
                options = [o.strip() for o in options_match.group(1).split(",")]
                options = [o for o in options if o]
                if options:
                    return f"[{options[seed % len(options)]}]"
        words = []
        for i in range(min(24, max(0, max_tokens))):
            pick = (seed >> (i % 48)) + i
            words.append(_ACTIONS[pick % len(_ACTIONS)].split()[0])
        return " ".join(words)


@dataclass
class EngineSet:
    """Everything one adapter process serves for its single kind."""

    kind: str
    embed_dim: Optional[int]
    captioners: Dict[str, CaptionEngine] = field(default_factory=dict)
    embedder: Optional[EmbedEngine] = None
    completers: Dict[str, CompletionEngine] = field(default_factory=dict)

    @property
    def model_tags(self) -> List[str]:
        if self.kind == "captioner":
            return sorted(self.captioners)
        if self.kind == "llm":
            return sorted(self.completers)
        return ["builtin-encoder"]


EngineFactory = Callable[[str, str, Optional[int]], EngineSet]

_REGISTRY: Dict[str, EngineFactory] = {}


def register_engine(checkpoint: str, factory: EngineFactory) -> None:
    _REGISTRY[checkpoint] = factory


def _builtin(kind: str, checkpoint: str, embed_dim: Optional[int]) -> EngineSet:
    if kind == "captioner":
        return EngineSet(
            kind=kind,
            embed_dim=None,
            captioners={tag: CaptionEngine(tag) for tag in BUILTIN_CAPTIONER_TAGS},
        )
    if kind == "llm":
        return EngineSet(
            kind=kind,
            embed_dim=None,
            completers={"llm-echo": CompletionEngine("llm-echo")},
        )
    dim = embed_dim or 512
    return EngineSet(kind=kind, embed_dim=dim, embedder=EmbedEngine(dim))


register_engine("builtin", _builtin)


def load_engines(kind: str, checkpoint: str, embed_dim: Optional[int]) -> EngineSet:
    """Build the engine set for one process; unknown checkpoints fail loudly."""
    if kind not in KINDS:
        raise EngineError(f"unknown kind {kind!r}")
    family = checkpoint.split(":", 1)[0]
    factory = _REGISTRY.get(family)
    if factory is None:
        raise EngineError(
            f"cannot load checkpoint {checkpoint!r}: no engine registered for "
            f"{family!r} (available: {sorted(_REGISTRY)})"
        )
    return factory(kind, checkpoint, embed_dim)
