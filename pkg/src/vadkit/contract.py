"""Wire-protocol conformance checks for backend servers.

These checks define what the engine requires from anything serving
/v1/complete, /v1/embed or /v1/caption: response shapes, the error
envelope, and encoder determinism. The engine's own test suite runs
them against a reference stub; adapter packages run the same functions
against their live servers.

Each checker raises ContractViolation with a specific message; the
suite entry point returns the list of check names that ran.
"""
from __future__ import annotations

import math
from typing import Callable, List, Optional, Tuple

import requests

Poster = Callable[[str, dict], Tuple[int, dict]]


class ContractViolation(AssertionError):
    pass


def http_poster(base_url: str, timeout_s: float = 10.0) -> Poster:
    base = base_url.rstrip("/")

    def post(path: str, payload: dict) -> Tuple[int, dict]:
        resp = requests.post(base + path, json=payload, timeout=timeout_s)
        try:
            body = resp.json()
        except ValueError:
            body = {}
        return resp.status_code, body

    return post


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ContractViolation(message)


def check_complete(post: Poster, model: str) -> None:
    status, body = post(
        "/v1/complete",
        {"model": model, "prompt": "Describe the weather.", "temperature": 0.0,
         "max_tokens": 32},
    )
    _require(status == 200, f"/v1/complete returned {status}")
    _require(isinstance(body.get("text"), str), "complete response lacks text field")

    status, body = post(
        "/v1/complete",
        {"model": model, "prompt": "Describe the weather.", "temperature": 0.0,
         "max_tokens": 1},
    )
    _require(status == 200, f"/v1/complete (max_tokens=1) returned {status}")
    _require(
        len(body.get("text", "").split()) <= 1,
        "max_tokens=1 should yield at most one token of text",
    )


def check_caption(post: Poster, model: str) -> None:
    status, body = post(
        "/v1/caption", {"model": model, "uri": "frame://contract/0"}
    )
    _require(status == 200, f"/v1/caption returned {status}")
    text = body.get("text")
    _require(
        isinstance(text, str) and bool(text.strip()),
        "caption response must carry nonempty text",
    )


def check_embed(
    post: Poster, model: str, modality: str, expected_dim: Optional[int] = None
) -> None:
    payload = {
        "model": model,
        "modality": modality,
        "input": "a quiet street" if modality == "text" else "frame://contract/7",
    }
    responses = []
    for _ in range(2):
        status, body = post("/v1/embed", payload)
        _require(status == 200, f"/v1/embed ({modality}) returned {status}")
        values = body.get("embedding")
        _require(
            isinstance(values, list) and values
            and all(isinstance(x, (int, float)) for x in values),
            "embed response must carry a numeric embedding list",
        )
        _require(
            body.get("dim") == len(values),
            "embed dim field must equal the vector length",
        )
        if expected_dim is not None:
            _require(
                len(values) == expected_dim,
                f"embedding dim {len(values)} != expected {expected_dim}",
            )
        if body.get("normalized") is True:
            norm = math.sqrt(sum(x * x for x in values))
            _require(
                abs(norm - 1.0) <= 1e-4,
                "normalized=true but the vector is not unit-norm",
            )
        responses.append(values)
    _require(responses[0] == responses[1], f"{modality} encoder is not deterministic")


def check_error_envelope(post: Poster, path: str) -> None:
    status, body = post(path, {"bogus": True})
    _require(status >= 400, f"{path} accepted a malformed body (status {status})")
    envelope = body.get("error")
    _require(isinstance(envelope, dict), f"{path} error response lacks envelope")
    _require(
        envelope.get("retryable") is False,
        f"{path} malformed-body error must be retryable=false",
    )
    _require(
        isinstance(envelope.get("message"), str) and envelope["message"],
        f"{path} error envelope lacks a message",
    )


def run_contract_suite(
    post: Poster,
    kind: str,
    model_tags: List[str],
    embed_dim: Optional[int] = None,
) -> List[str]:
    """Run every check that applies to a backend of the given kind."""
    ran: List[str] = []
    if kind == "llm":
        for tag in model_tags:
            check_complete(post, tag)
            ran.append(f"complete[{tag}]")
        check_error_envelope(post, "/v1/complete")
        ran.append("error_envelope[/v1/complete]")
    elif kind == "captioner":
        for tag in model_tags:
            check_caption(post, tag)
            ran.append(f"caption[{tag}]")
        check_error_envelope(post, "/v1/caption")
        ran.append("error_envelope[/v1/caption]")
    elif kind in ("text_encoder", "image_encoder", "video_encoder"):
        modality = kind.split("_", 1)[0]
        for tag in model_tags:
            check_embed(post, tag, modality, expected_dim=embed_dim)
            ran.append(f"embed[{tag}:{modality}]")
        check_error_envelope(post, "/v1/embed")
        ran.append("error_envelope[/v1/embed]")
    else:
        raise ValueError(f"unknown backend kind {kind!r}")
    return ran
