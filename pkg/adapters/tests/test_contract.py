"""Run the engine's wire-contract suite against live adapter servers.

Each adapter kind is served over real HTTP (uvicorn in a thread) and
must pass vadkit.contract unchanged.
"""
from __future__ import annotations

import threading
import time

import pytest
import uvicorn

from vad_adapters import AdapterConfig, create_app
from vad_adapters.engines import BUILTIN_CAPTIONER_TAGS
from vadkit.contract import http_poster, run_contract_suite

EMBED_DIM = 96


class LiveAdapter:
    def __init__(self, kind: str):
        config = AdapterConfig(kind=kind, embed_dim=EMBED_DIM, port=0)
        app = create_app(config)
        self.server = uvicorn.Server(
            uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        )
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self):
        self.thread.start()
        deadline = time.monotonic() + 10
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("adapter server did not start")
            time.sleep(0.01)
        port = self.server.servers[0].sockets[0].getsockname()[1]
        self.base_url = f"http://127.0.0.1:{port}"
        return self

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=10)


@pytest.fixture(scope="module", params=[
    "captioner", "text_encoder", "image_encoder", "video_encoder", "llm",
])
def live(request):
    with LiveAdapter(request.param) as adapter:
        yield request.param, adapter


def test_contract_suite_passes(live):
    kind, adapter = live
    post = http_poster(adapter.base_url)
    if kind == "captioner":
        tags = list(BUILTIN_CAPTIONER_TAGS)
        embed_dim = None
    elif kind == "llm":
        tags = ["llm-echo"]
        embed_dim = None
    else:
        tags = ["builtin-encoder"]
        embed_dim = EMBED_DIM
    ran = run_contract_suite(post, kind, tags, embed_dim=embed_dim)
    assert ran, "contract suite ran no checks"


def test_health_reports_served_models(live):
    import requests

    kind, adapter = live
    body = requests.get(adapter.base_url + "/v1/health", timeout=5).json()
    assert body["kind"] == kind
    if kind == "captioner":
        assert body["model_tags"] == sorted(BUILTIN_CAPTIONER_TAGS)
    if kind.endswith("encoder"):
        assert body["embed_dim"] == EMBED_DIM
