"""Drive the whole vadkit pipeline against live adapter processes.

Every backend (five captioner variants, three encoders, the LLM) is a
real HTTP server here; only the dataset fixture is synthetic.
"""
from __future__ import annotations

import dataclasses

import pytest

from test_contract import EMBED_DIM, LiveAdapter
from vadkit.core import SCORE_LEVELS, PipelineConfig
from vadkit.fixtures import make_demo_fixture
from vadkit.manifest import load_manifest
from vadkit.pipeline import run_pipeline

KINDS = ("captioner", "text_encoder", "image_encoder", "video_encoder", "llm")


@pytest.fixture(scope="module")
def live_backends():
    adapters = {kind: LiveAdapter(kind) for kind in KINDS}
    for adapter in adapters.values():
        adapter.__enter__()
    yield {kind: adapter.base_url for kind, adapter in adapters.items()}
    for adapter in adapters.values():
        adapter.__exit__()


def test_pipeline_runs_against_live_adapters(live_backends, tmp_path):
    config = PipelineConfig(
        workers=2,
        embed_dim=EMBED_DIM,
        captioner_endpoint=live_backends["captioner"],
        captioner_models=("cap-a", "cap-b"),
        text_encoder_endpoint=live_backends["text_encoder"],
        image_encoder_endpoint=live_backends["image_encoder"],
        video_encoder_endpoint=live_backends["video_encoder"],
        llm_endpoint=live_backends["llm"],
        llm_model="llm-echo",
        backoff_base_s=0.01,
    )
    manifest = load_manifest(make_demo_fixture(tmp_path / "fixture", config))

    report = run_pipeline(manifest, config, tmp_path / "cache", tmp_path / "out")
    assert report.num_videos == 3
    assert report.roc_auc is not None  # metrics computable, value not asserted

    rerun = run_pipeline(manifest, config, tmp_path / "cache")
    assert rerun.to_json() == report.to_json()


def test_adapter_scores_land_on_the_grid(live_backends, tmp_path):
    import json

    config = PipelineConfig(
        workers=1,
        embed_dim=EMBED_DIM,
        captioner_endpoint=live_backends["captioner"],
        captioner_models=("cap-a",),
        text_encoder_endpoint=live_backends["text_encoder"],
        image_encoder_endpoint=live_backends["image_encoder"],
        video_encoder_endpoint=live_backends["video_encoder"],
        llm_endpoint=live_backends["llm"],
        llm_model="llm-echo",
    )
    fixture = make_demo_fixture(
        tmp_path / "fixture", dataclasses.replace(config, workers=1)
    )
    manifest = load_manifest(fixture)
    run_pipeline(manifest, config, tmp_path / "cache", tmp_path / "out")
    scores = json.loads(
        (tmp_path / "out" / "scores" / "v-lobby.json").read_text()
    )
    assert all(value in SCORE_LEVELS for value in scores["initial"])
