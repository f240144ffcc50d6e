"""Dataset manifests and temporal-annotation ingestion.

A manifest is a JSON document naming the dataset's videos (id, frame
count, fps), a frame-uri template for the backends, the annotation file
and its format, and optionally a mock-world file plus expected video
counts to validate against.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

from .backends import FrameRef
from .core import AnnotationError, GroundTruth, VadError, VideoMeta

DEFAULT_SNIPPET_TEMPLATE = "video://{video_id}#t={start_s:.3f},{end_s:.3f}"

ANNOTATION_FORMATS = ("ucf_interval", "xd_interval")


class ManifestError(VadError):
    """The dataset manifest is malformed or fails its declared expectations."""


@dataclass(frozen=True)
class DatasetManifest:
    dataset: str
    videos: Tuple[VideoMeta, ...]
    frame_uri_template: str
    snippet_uri_template: str = DEFAULT_SNIPPET_TEMPLATE
    annotations_path: Optional[Path] = None
    annotation_format: str = "ucf_interval"
    mock_world_path: Optional[Path] = None
    expected_counts: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for meta in self.videos:
            if meta.video_id in seen:
                raise ManifestError(f"duplicate video_id {meta.video_id!r}")
            if "/" in meta.video_id or "\\" in meta.video_id:
                raise ManifestError(
                    f"video_id {meta.video_id!r} must not contain path separators"
                )
            seen.add(meta.video_id)
        if self.annotation_format not in ANNOTATION_FORMATS:
            raise ManifestError(
                f"unknown annotation format {self.annotation_format!r}"
            )

    def meta(self, video_id: str) -> VideoMeta:
        for meta in self.videos:
            if meta.video_id == video_id:
                return meta
        raise KeyError(video_id)

    def frame_ref(self, video_id: str, frame_index: int) -> FrameRef:
        uri = self.frame_uri_template.format(
            video_id=video_id, frame_index=frame_index
        )
        return FrameRef(video_id=video_id, frame_index=frame_index, uri=uri)

    def snippet_root(self, video_id: str) -> FrameRef:
        uri = self.frame_uri_template.format(video_id=video_id, frame_index=0)
        return FrameRef(video_id=video_id, frame_index=0, uri=uri)


def load_manifest(path: Path | str) -> DatasetManifest:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc

    try:
        videos = tuple(
            VideoMeta(
                video_id=v["video_id"],
                num_frames=int(v["num_frames"]),
                fps=float(v["fps"]),
            )
            for v in payload["videos"]
        )
        manifest = DatasetManifest(
            dataset=payload["dataset"],
            videos=videos,
            frame_uri_template=payload["frame_uri_template"],
            snippet_uri_template=payload.get(
                "snippet_uri_template", DEFAULT_SNIPPET_TEMPLATE
            ),
            annotations_path=_resolve(path, payload.get("annotations")),
            annotation_format=payload.get("annotation_format", "ucf_interval"),
            mock_world_path=_resolve(path, payload.get("mock_world")),
            expected_counts=payload.get("expected_counts", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"manifest {path} is malformed: {exc}") from exc

    expected_total = manifest.expected_counts.get("total")
    if expected_total is not None and expected_total != len(manifest.videos):
        raise ManifestError(
            f"manifest declares {expected_total} videos but lists "
            f"{len(manifest.videos)}"
        )
    return manifest


def _resolve(manifest_path: Path, value: Optional[str]) -> Optional[Path]:
    if value is None:
        return None
    candidate = Path(value)
    return candidate if candidate.is_absolute() else manifest_path.parent / candidate


def _parse_interval_line(
    line: str, line_no: int, fmt: str
) -> Tuple[str, Tuple[Tuple[int, int], ...]]:
    tokens = line.split()
    if len(tokens) < 2:
        raise AnnotationError(f"line {line_no}: too few fields")
    name = tokens[0]
    rest = tokens[1:]
    if fmt == "ucf_interval" and rest and not _is_int(rest[0]):
        rest = rest[1:]  # optional class label
    if len(rest) % 2 != 0 or not rest:
        raise AnnotationError(f"line {line_no}: expected start/end pairs")
    try:
        numbers = [int(t) for t in rest]
    except ValueError as exc:
        raise AnnotationError(f"line {line_no}: non-integer bound") from exc

    intervals = []
    for start, end in zip(numbers[::2], numbers[1::2]):
        if fmt == "ucf_interval" and start == -1 and end == -1:
            continue  # sentinel for an absent interval
        if start < 0 or end < start:
            raise AnnotationError(
                f"line {line_no}: bad interval ({start}, {end}) for {name!r}"
            )
        intervals.append((start, end))
    return name, tuple(intervals)


def _is_int(token: str) -> bool:
    try:
        int(token)
        return True
    except ValueError:
        return False


def ingest_annotations(path: Path | str, fmt: str) -> Dict[str, GroundTruth]:
    """Parse a temporal-annotation file into per-video ground truth.

    Frame numbers in the file are taken as 0-based inclusive. The UCF
    style allows an optional class column and uses -1/-1 sentinels for
    absent intervals; the XD style lists plain start/end pairs.
    """
    if fmt not in ANNOTATION_FORMATS:
        raise AnnotationError(f"unknown annotation format {fmt!r}")
    path = Path(path)
    result: Dict[str, GroundTruth] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            name, intervals = _parse_interval_line(line, line_no, fmt)
            if name in result:
                raise AnnotationError(f"line {line_no}: duplicate video {name!r}")
            result[name] = GroundTruth(video_id=name, intervals=intervals)
    return result
