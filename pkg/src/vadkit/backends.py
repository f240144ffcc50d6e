"""Model backends: the five capabilities behind one small wire protocol.

Every model the engine talks to (captioner, text/image/video encoder,
LLM) sits behind three JSON-over-HTTP endpoints:

    POST /v1/complete  {"model", "prompt", "temperature", "max_tokens"} -> {"text"}
    POST /v1/embed     {"model", "modality", "input"} -> {"embedding", "dim"}
    POST /v1/caption   {"model", "uri"} -> {"text"}

Failures use a non-200 status with {"error": {"retryable": bool,
"message": str}}. Descriptors with endpoint "mock" resolve to the
deterministic in-process backends instead (see mock_backends).
"""
from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import requests

from .core import ConfigError, EmbeddingVector, TemporalWindow, VadError

KINDS = ("captioner", "text_encoder", "image_encoder", "video_encoder", "llm")

TOKEN_ENV_VAR = "VADKIT_API_TOKEN"


class BackendError(VadError):
    """Base class for backend failures."""


class BackendRetryableError(BackendError):
    """Transient failure; retries were exhausted."""


class BackendPermanentError(BackendError):
    """The backend rejected the request; retrying cannot help."""


@dataclass(frozen=True)
class BackendDescriptor:
    kind: str
    endpoint: str
    model_tag: str
    embed_dim: Optional[int] = None
    timeout_s: float = 30.0
    max_inflight: int = 4
    max_retries: int = 3
    backoff_base_s: float = 0.25
    temperature: float = 0.0
    max_tokens: int = 512

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown backend kind {self.kind!r}")
        if self.max_inflight < 1:
            raise ConfigError("max_inflight must be >= 1")
        if self.kind.endswith("encoder") and not self.embed_dim:
            raise ConfigError(f"{self.kind} requires embed_dim")

    @property
    def is_mock(self) -> bool:
        return self.endpoint == "mock"


@dataclass(frozen=True)
class FrameRef:
    video_id: str
    frame_index: int
    uri: str

    def __post_init__(self):
        if not self.uri:
            raise ValueError("frame uri must be nonempty")


# transport(url, payload, timeout_s, headers) -> (status_code, parsed body)
Transport = Callable[[str, dict, float, dict], Tuple[int, dict]]


def _requests_transport(url: str, payload: dict, timeout_s: float, headers: dict):
    try:
        resp = requests.post(url, json=payload, timeout=timeout_s, headers=headers)
    except requests.RequestException as exc:
        raise _Transient(str(exc)) from exc
    try:
        body = resp.json()
    except ValueError:
        body = {}
    return resp.status_code, body


class _Transient(Exception):
    """Internal marker for retryable transport failures."""


class HttpBackend:
    """Client for one backend process; safe to share across workers.

    A semaphore bounds in-flight requests to the descriptor's
    max_inflight; retryable failures back off exponentially up to
    max_retries before surfacing as BackendRetryableError.
    """

    def __init__(self, descriptor: BackendDescriptor, transport: Transport = None):
        self.descriptor = descriptor
        self._transport = transport or _requests_transport
        self._gate = threading.BoundedSemaphore(descriptor.max_inflight)

    # -- wire plumbing ----------------------------------------------------

    def _headers(self) -> dict:
        headers = {}
        token = os.environ.get(TOKEN_ENV_VAR)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def _post(self, path: str, payload: dict, context: str, validate=None) -> dict:
        """POST with bounded concurrency and exponential-backoff retries.

        ``validate`` may inspect a 200 body and return an error message to
        treat the response as a retryable failure (e.g. empty captions).
        """
        url = self.descriptor.endpoint.rstrip("/") + path
        last_error = "no attempt made"
        for attempt in range(self.descriptor.max_retries + 1):
            if attempt:
                time.sleep(self.descriptor.backoff_base_s * 2 ** (attempt - 1))
            try:
                with self._gate:
                    status, body = self._transport(
                        url, payload, self.descriptor.timeout_s, self._headers()
                    )
            except _Transient as exc:
                last_error = str(exc)
                continue
            if status == 200:
                problem = validate(body) if validate else None
                if problem is None:
                    return body
                last_error = problem
                continue
            envelope = body.get("error") if isinstance(body, dict) else None
            message = (
                envelope.get("message", "") if isinstance(envelope, dict) else ""
            ) or f"HTTP {status}"
            if isinstance(envelope, dict) and "retryable" in envelope:
                retryable = bool(envelope["retryable"])
            else:
                retryable = status >= 500
            if not retryable:
                raise BackendPermanentError(f"{context}: {message}")
            last_error = message
        raise BackendRetryableError(
            f"{context}: retries exhausted ({last_error})"
        )

    def _require_kind(self, kind: str):
        if self.descriptor.kind != kind:
            raise ConfigError(
                f"backend {self.descriptor.model_tag!r} is {self.descriptor.kind}, "
                f"not {kind}"
            )

    def _embed(self, modality: str, input_str: str, context: str) -> EmbeddingVector:
        body = self._post(
            "/v1/embed",
            {
                "model": self.descriptor.model_tag,
                "modality": modality,
                "input": input_str,
            },
            context,
        )
        values = body.get("embedding")
        dim = body.get("dim")
        if not isinstance(values, list) or not values:
            raise BackendPermanentError(f"{context}: malformed embedding response")
        if dim != len(values):
            raise BackendPermanentError(f"{context}: dim field disagrees with vector")
        if self.descriptor.embed_dim and dim != self.descriptor.embed_dim:
            raise ConfigError(
                f"{context}: backend returned dim {dim}, run expects "
                f"{self.descriptor.embed_dim}"
            )
        return EmbeddingVector.from_raw(values)  # renormalize regardless

    # -- capabilities ------------------------------------------------------

    def caption(self, frame: FrameRef) -> str:
        self._require_kind("captioner")
        context = f"caption {frame.video_id}#{frame.frame_index}"
        body = self._post(
            "/v1/caption",
            {"model": self.descriptor.model_tag, "uri": frame.uri},
            context,
            validate=lambda b: None if str(b.get("text", "")).strip() else "empty caption",
        )
        return str(body["text"]).strip()

    def embed_text(self, text: str) -> EmbeddingVector:
        self._require_kind("text_encoder")
        if not text:
            raise ValueError("cannot embed empty text")
        return self._embed("text", text, f"embed_text {text[:40]!r}")

    def embed_image(self, frame: FrameRef) -> EmbeddingVector:
        self._require_kind("image_encoder")
        return self._embed(
            "image", frame.uri, f"embed_image {frame.video_id}#{frame.frame_index}"
        )

    def embed_video(self, window: TemporalWindow, root: FrameRef) -> EmbeddingVector:
        self._require_kind("video_encoder")
        uri = f"{root.uri}#t={window.start_s:.3f},{window.end_s:.3f}"
        return self._embed(
            "video", uri, f"embed_video {window.video_id}@{window.center_frame}"
        )

    def complete(self, prompt: str) -> str:
        self._require_kind("llm")
        if not prompt:
            raise ValueError("prompt must be nonempty")
        body = self._post(
            "/v1/complete",
            {
                "model": self.descriptor.model_tag,
                "prompt": prompt,
                "temperature": self.descriptor.temperature,
                "max_tokens": self.descriptor.max_tokens,
            },
            "complete",
        )
        return str(body.get("text", ""))


def make_backend(descriptor: BackendDescriptor, mock_world=None, transport=None):
    """Instantiate the client for a descriptor (mock or HTTP)."""
    if descriptor.is_mock:
        from .mock_backends import MockBackend

        return MockBackend(descriptor, world=mock_world)
    return HttpBackend(descriptor, transport=transport)
