from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from vad_adapters import AdapterConfig, create_app
from vad_adapters.cli import main
from vad_adapters.engines import EngineError, load_engines


@pytest.fixture
def llm_client():
    return TestClient(create_app(AdapterConfig(kind="llm")))


@pytest.fixture
def text_client():
    return TestClient(create_app(AdapterConfig(kind="text_encoder", embed_dim=32)))


@pytest.fixture
def caption_client():
    return TestClient(create_app(AdapterConfig(kind="captioner")))


class TestComplete:
    def test_max_tokens_truncates(self, llm_client):
        body = {"model": "llm-echo", "prompt": "hello", "temperature": 0.0}
        one = llm_client.post("/v1/complete", json=body | {"max_tokens": 1}).json()
        many = llm_client.post("/v1/complete", json=body | {"max_tokens": 16}).json()
        assert len(one["text"].split()) <= 1
        assert len(many["text"].split()) > 1

    def test_unknown_model_is_non_retryable(self, llm_client):
        resp = llm_client.post(
            "/v1/complete",
            json={"model": "nope", "prompt": "hi", "temperature": 0, "max_tokens": 4},
        )
        assert resp.status_code == 400
        assert resp.json()["error"]["retryable"] is False

    def test_malformed_body_envelope(self, llm_client):
        resp = llm_client.post("/v1/complete", json={"bogus": 1})
        assert resp.status_code == 400
        envelope = resp.json()["error"]
        assert envelope["retryable"] is False
        assert envelope["message"]

    def test_wrong_endpoint_for_kind_is_404(self, llm_client):
        resp = llm_client.post(
            "/v1/caption", json={"model": "x", "uri": "frame://a/0"}
        )
        assert resp.status_code == 404


class TestEmbed:
    def test_deterministic_and_normalized(self, text_client):
        body = {"model": "builtin-encoder", "modality": "text", "input": "a"}
        first = text_client.post("/v1/embed", json=body).json()
        second = text_client.post("/v1/embed", json=body).json()
        assert first["embedding"] == second["embedding"]
        assert first["dim"] == 32
        assert first["normalized"] is True
        norm = sum(v * v for v in first["embedding"]) ** 0.5
        assert abs(norm - 1.0) < 1e-9

    def test_foreign_modality_rejected(self, text_client):
        resp = text_client.post(
            "/v1/embed",
            json={"model": "builtin-encoder", "modality": "image", "input": "u"},
        )
        assert resp.status_code == 400


class TestCaption:
    def test_five_variant_tags_served(self, caption_client):
        texts = set()
        for tag in ("cap-a", "cap-b", "cap-c", "cap-d", "cap-e"):
            resp = caption_client.post(
                "/v1/caption", json={"model": tag, "uri": "frame://v/0"}
            )
            assert resp.status_code == 200
            texts.add(resp.json()["text"])
        assert len(texts) > 1  # variants disagree on at least some frames

    def test_caption_nonempty_and_stable(self, caption_client):
        body = {"model": "cap-a", "uri": "frame://v/7"}
        a = caption_client.post("/v1/caption", json=body).json()["text"]
        b = caption_client.post("/v1/caption", json=body).json()["text"]
        assert a == b
        assert a.strip()


class TestEngines:
    def test_unknown_checkpoint_fails_loudly(self):
        with pytest.raises(EngineError, match="no engine registered"):
            load_engines("llm", "hf:some/model", None)

    def test_one_kind_per_process(self):
        with pytest.raises(ValueError):
            AdapterConfig(kind="everything")


class TestProbe:
    def test_probe_prints_served_surface(self, capsys):
        code = main(["captioner", "--probe"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["kind"] == "captioner"
        assert payload["model_tags"] == sorted(
            ["cap-a", "cap-b", "cap-c", "cap-d", "cap-e"]
        )

    def test_probe_unknown_checkpoint_exits_nonzero(self, capsys):
        code = main(["llm", "--probe", "--checkpoint", "hf:missing"])
        assert code == 2
        assert "fatal" in capsys.readouterr().err
