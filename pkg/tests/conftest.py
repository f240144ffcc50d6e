from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py / wire_stub.py

from vadkit.backends import BackendDescriptor
from vadkit.core import PipelineConfig
from vadkit.fixtures import make_demo_fixture
from vadkit.mock_backends import MockBackend, MockWorld

EMBED_DIM = 64


def mock_backend(kind: str, tag: str = None, world: MockWorld = None) -> MockBackend:
    descriptor = BackendDescriptor(
        kind=kind,
        endpoint="mock",
        model_tag=tag or kind,
        embed_dim=EMBED_DIM if kind.endswith("encoder") else None,
    )
    return MockBackend(descriptor, world=world)


@pytest.fixture
def text_encoder():
    return mock_backend("text_encoder")


@pytest.fixture
def llm():
    return mock_backend("llm")


@pytest.fixture
def demo_config():
    return PipelineConfig(workers=2)


@pytest.fixture
def demo_fixture(tmp_path, demo_config):
    """Manifest path of the bundled 3-video mock fixture."""
    return make_demo_fixture(tmp_path / "fixture", demo_config)


class ScriptedLlm:
    """LLM stub that replays a fixed response sequence."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.prompts = []

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if not self.responses:
            raise AssertionError("scripted LLM ran out of responses")
        return self.responses.pop(0)


class FailingLlm:
    """LLM stub that always raises a retryable backend error."""

    def __init__(self):
        self.calls = 0

    def complete(self, prompt: str) -> str:
        from vadkit.backends import BackendRetryableError

        self.calls += 1
        raise BackendRetryableError("scripted failure")
