"""On-disk stage caches: JSON-lines for text records, a binary container
for embeddings, and the config fingerprint that namespaces both.

Layout: <root>/<dataset>/<fingerprint>/<stage>/<video_id>.jsonl with a
sidecar ".done" marker per video. A completed namespace is never
recomputed unless forced; any output-affecting config change yields a
new fingerprint and therefore a fresh namespace.

Embeddings use a 16-byte header (magic "EMB1", dim as uint32 LE, count
as uint64 LE) followed by count*dim float32 LE values, plus a ".keys"
sidecar with one key per line in row order.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .core import PipelineConfig, VadError

EMB_MAGIC = b"EMB1"

#: Config fields that change pipeline outputs; everything else (endpoints,
#: timeouts, concurrency, retry policy) is transport detail and excluded.
FINGERPRINT_FIELDS = (
    "stride",
    "window_seconds",
    "frames_per_window",
    "neighbors",
    "impersonation",
    "anomaly_prior",
    "pooling",
    "skip_cleaning",
    "skip_summary",
    "skip_refinement",
    "dedupe_window_captions",
    "expansion",
    "embed_dim",
    "captioner_models",
    "text_encoder_model",
    "image_encoder_model",
    "video_encoder_model",
    "llm_model",
    "llm_temperature",
    "llm_max_tokens",
)


class CacheError(VadError):
    """A cache file is malformed or inconsistent."""


def config_fingerprint(config: PipelineConfig) -> str:
    fields = asdict(config)
    subset = {name: fields[name] for name in FINGERPRINT_FIELDS}
    canon = json.dumps(subset, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


class StageCache:
    def __init__(self, root: Path | str, dataset: str, fingerprint: str):
        self.base = Path(root) / dataset / fingerprint

    def _record_path(self, stage: str, video_id: str) -> Path:
        return self.base / stage / f"{video_id}.jsonl"

    def _done_path(self, stage: str, video_id: str) -> Path:
        return self.base / stage / f"{video_id}.done"

    def is_complete(self, stage: str, video_id: str) -> bool:
        return self._done_path(stage, video_id).exists()

    def invalidate(self, stage: str, video_id: str) -> None:
        for path in (
            self._record_path(stage, video_id),
            self._done_path(stage, video_id),
        ):
            path.unlink(missing_ok=True)

    def write_records(
        self, stage: str, video_id: str, records: Iterable[dict]
    ) -> None:
        path = self._record_path(stage, video_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
                fh.write("\n")
        tmp.replace(path)
        self._done_path(stage, video_id).touch()

    def read_records(self, stage: str, video_id: str) -> List[dict]:
        path = self._record_path(stage, video_id)
        if not self.is_complete(stage, video_id):
            raise CacheError(f"stage {stage!r} incomplete for {video_id!r}")
        records = []
        with path.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise CacheError(f"{path}:{line_no}: bad record") from exc
        return records

    def embedding_path(self, stage: str, video_id: str) -> Path:
        return self.base / stage / f"{video_id}.emb"


def write_embeddings(
    path: Path | str, keys: Sequence[str], matrix: np.ndarray
) -> None:
    path = Path(path)
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise CacheError("embedding matrix must be 2-D")
    count, dim = matrix.shape
    if len(keys) != count:
        raise CacheError("one key per embedding row is required")
    if any("\n" in key for key in keys):
        raise CacheError("embedding keys must be single-line")
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".emb.tmp")
    with tmp.open("wb") as fh:
        fh.write(EMB_MAGIC)
        fh.write(struct.pack("<I", dim))
        fh.write(struct.pack("<Q", count))
        fh.write(matrix.tobytes())
    tmp.replace(path)
    key_path = path.with_suffix(path.suffix + ".keys")
    key_path.write_text("".join(f"{k}\n" for k in keys), encoding="utf-8")


def read_embeddings(
    path: Path | str, mmap: bool = False
) -> Tuple[List[str], np.ndarray]:
    path = Path(path)
    with path.open("rb") as fh:
        header = fh.read(16)
    if len(header) != 16 or header[:4] != EMB_MAGIC:
        raise CacheError(f"{path}: not an embedding container")
    dim = struct.unpack("<I", header[4:8])[0]
    count = struct.unpack("<Q", header[8:16])[0]
    expected = 16 + count * dim * 4
    if path.stat().st_size != expected:
        raise CacheError(f"{path}: truncated container")
    if mmap:
        matrix = np.memmap(path, dtype="<f4", mode="r", offset=16, shape=(count, dim))
    else:
        raw = path.read_bytes()[16:]
        matrix = np.frombuffer(raw, dtype="<f4").reshape(count, dim)
    key_path = path.with_suffix(path.suffix + ".keys")
    keys = key_path.read_text(encoding="utf-8").splitlines()
    if len(keys) != count:
        raise CacheError(f"{key_path}: key count disagrees with container")
    return keys, matrix
