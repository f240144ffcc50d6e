"""Bundled mock fixture: three videos with a planted anomalous interval.

The fixture declares a "true caption" for every sampled frame; captions
inside the planted interval carry a 0.9 score marker, the rest carry
0.1 (see mock_backends for how markers steer the mock LLM and the mock
encoders). Because temporal windows blur markers outward, the written
ground truth is derived with the same pure window/expansion geometry
the pipeline uses, so a mock run separates the classes perfectly and
the fixture is a stable end-to-end determinism probe.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

from .core import PipelineConfig, VideoMeta, sample_frames
from .evaluation import expand_lattice, threshold_detections
from .mock_backends import MockWorld
from .summary import build_window

_NORMAL_PHRASES = (
    "people walk past a storefront",
    "a car waits at the traffic light",
    "a cyclist crosses the empty street",
    "a cleaner sweeps the pavement",
    "pedestrians pass under the awning",
)

_ANOMALOUS_PHRASES = (
    "two figures struggle near the doorway",
    "a man smashes the window of a parked car",
    "someone sprints away clutching a bag",
    "a group shoves a person against the wall",
)


@dataclass(frozen=True)
class FixtureVideo:
    video_id: str
    num_frames: int
    fps: float
    core_interval: Optional[Tuple[int, int]]  # planted anomalous frames


DEFAULT_VIDEOS = (
    FixtureVideo("v-street", 960, 8.0, (320, 560)),
    FixtureVideo("v-lobby", 800, 8.0, None),
    FixtureVideo("v-garage", 720, 8.0, (96, 280)),
)


def _caption_for(video: FixtureVideo, frame: int, anomalous: bool) -> str:
    phrases = _ANOMALOUS_PHRASES if anomalous else _NORMAL_PHRASES
    phrase = phrases[(frame // 16) % len(phrases)]
    marker = 0.9 if anomalous else 0.1
    return f"{phrase} near mark {frame} SCORE_FIXTURE={marker:g}"


def make_demo_fixture(
    root: Path | str,
    config: Optional[PipelineConfig] = None,
    videos: Tuple[FixtureVideo, ...] = DEFAULT_VIDEOS,
) -> Path:
    """Write manifest, annotations and mock world under ``root``.

    Returns the manifest path. The planted per-frame labels are chosen
    so that, under the given config's window geometry and expansion
    mode, the mock pipeline scores exactly 0.9 on anomalous frames and
    0.1 on normal ones.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    config = config or PipelineConfig()

    true_captions: Dict[Tuple[str, int], str] = {}
    annotation_lines = []

    for video in videos:
        meta = VideoMeta(video.video_id, video.num_frames, video.fps)
        lattice = sample_frames(meta, config.stride)
        core = set()
        if video.core_interval is not None:
            start, end = video.core_interval
            core = {f for f in lattice.indices if start <= f <= end}

        for frame in lattice.indices:
            true_captions[(video.video_id, frame)] = _caption_for(
                video, frame, frame in core
            )

        # frames whose window reaches a marked caption score 0.9
        marked = []
        for center in lattice.indices:
            window = build_window(
                center, meta, lattice,
                config.window_seconds, config.frames_per_window,
            )
            marked.append(
                1.0 if any(m in core for m in window.member_frames) else 0.0
            )
        expanded = expand_lattice(
            lattice.indices, marked, meta.num_frames, config.expansion
        )
        intervals = threshold_detections(expanded, 0.5)
        if intervals:
            bounds = " ".join(f"{s} {e}" for s, e in intervals)
            pad = " -1 -1" * max(0, 2 - len(intervals))
            annotation_lines.append(
                f"{video.video_id} planted {bounds}{pad}"
            )
        else:
            annotation_lines.append(f"{video.video_id} normal -1 -1 -1 -1")

    world = MockWorld(
        true_captions=true_captions,
        primary_source=(config.captioner_models or ("cap-a",))[0],
    )
    world.to_file(root / "world.json")
    (root / "annotations.txt").write_text(
        "\n".join(annotation_lines) + "\n", encoding="utf-8"
    )

    anomalous = sum(1 for v in videos if v.core_interval is not None)
    manifest = {
        "dataset": "mock3",
        "frame_uri_template": "frame://{video_id}/{frame_index}",
        "annotations": "annotations.txt",
        "annotation_format": "ucf_interval",
        "mock_world": "world.json",
        "expected_counts": {
            "total": len(videos),
            "anomalous": anomalous,
            "normal": len(videos) - anomalous,
        },
        "videos": [
            {"video_id": v.video_id, "num_frames": v.num_frames, "fps": v.fps}
            for v in videos
        ],
    }
    manifest_path = root / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest_path


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m vadkit.fixtures OUTPUT_DIR", file=sys.stderr)
        return 2
    path = make_demo_fixture(argv[0])
    print(f"fixture written: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
