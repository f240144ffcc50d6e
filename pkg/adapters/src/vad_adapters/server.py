"""FastAPI app implementing the backend wire protocol for one kind.

Endpoints and the error envelope follow the engine contract exactly:
non-200 responses carry {"error": {"retryable": bool, "message": str}},
and malformed request bodies are non-retryable 400s.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engines import KINDS, EngineError, EngineSet, load_engines


@dataclass(frozen=True)
class AdapterConfig:
    kind: str
    checkpoint: str = "builtin"
    device: str = "cpu"
    port: int = 8080
    embed_dim: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 0 <= self.port <= 65535:
            raise ValueError(f"bad port {self.port}")


class CompleteRequest(BaseModel):
    model: str
    prompt: str
    temperature: float = 0.0
    max_tokens: int = 512


class EmbedRequest(BaseModel):
    model: str
    modality: str
    input: str


class CaptionRequest(BaseModel):
    model: str
    uri: str


def _error(status: int, message: str, retryable: bool = False) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"retryable": retryable, "message": message}},
    )


def create_app(config: AdapterConfig) -> FastAPI:
    engines: EngineSet = load_engines(config.kind, config.checkpoint, config.embed_dim)
    app = FastAPI(title=f"vad-adapter ({config.kind})")
    app.state.engines = engines
    app.state.config = config

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return _error(400, f"malformed request body: {exc.errors()[:1]}")

    @app.exception_handler(EngineError)
    async def engine_failure(request: Request, exc: EngineError):
        return _error(400, str(exc))

    @app.get("/v1/health")
    async def health():
        return {
            "kind": config.kind,
            "checkpoint": config.checkpoint,
            "model_tags": engines.model_tags,
            "embed_dim": engines.embed_dim,
        }

    if config.kind == "llm":

        @app.post("/v1/complete")
        async def complete(body: CompleteRequest):
            engine = engines.completers.get(body.model)
            if engine is None:
                return _error(400, f"unknown model {body.model!r}")
            if not body.prompt:
                return _error(400, "prompt must be nonempty")
            if body.max_tokens < 0:
                return _error(400, "max_tokens must be >= 0")
            text = engine.complete(body.prompt, body.temperature, body.max_tokens)
            return {"text": text}

    if config.kind.endswith("encoder"):
        served_modality = config.kind.split("_", 1)[0]

        @app.post("/v1/embed")
        async def embed(body: EmbedRequest):
            if body.modality not in ("text", "image", "video"):
                return _error(400, f"unknown modality {body.modality!r}")
            if body.modality != served_modality:
                return _error(
                    400,
                    f"this adapter serves {served_modality!r} embeddings, "
                    f"not {body.modality!r}",
                )
            if not body.input:
                return _error(400, "input must be nonempty")
            values = engines.embedder.embed(body.modality, body.input)
            # dim is reported truthfully; vectors are already unit-norm
            return {
                "embedding": values,
                "dim": len(values),
                "normalized": True,
            }

    if config.kind == "captioner":

        @app.post("/v1/caption")
        async def caption(body: CaptionRequest):
            engine = engines.captioners.get(body.model)
            if engine is None:
                return _error(400, f"unknown model {body.model!r}")
            if not body.uri:
                return _error(400, "uri must be nonempty")
            return {"text": engine.caption(body.uri)}

    return app


def serve(config: AdapterConfig) -> None:
    """Run the adapter until interrupted; load failures exit with a message."""
    import sys

    import uvicorn

    try:
        app = create_app(config)
    except EngineError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        raise SystemExit(2)
    uvicorn.run(app, host="0.0.0.0", port=config.port, log_level="info")
