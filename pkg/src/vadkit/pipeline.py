"""Pipeline orchestration: caption, clean, summarize, score, refine and
evaluate, per video, with stage-level caching and resume.

Videos proceed independently (bounded by the worker pool); within a
video the stages form a strict sequence. Every stage writes its records
sorted by frame index, so reruns with an unchanged config fingerprint
are bit-identical and resume is a pure cache read.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import cleaning, evaluation, refinement, scoring, summary
from .backends import BackendDescriptor, BackendError, make_backend
from .cache import StageCache, config_fingerprint, write_embeddings
from .core import (
    CaptionRecord,
    EmbeddingVector,
    GroundTruth,
    PipelineConfig,
    SampledSequence,
    ScoreSeries,
    TemporalWindow,
    VadError,
    VideoMeta,
    labels_from_intervals,
    sample_frames,
)
from .manifest import DatasetManifest, ingest_annotations
from .mock_backends import MockWorld

STAGES = ("captions", "cleaned", "summaries", "scores", "refined")


class RunAborted(VadError):
    """Too many per-item failures in one stage."""


@dataclass
class PipelineBackends:
    captioners: Dict[str, object]
    text_encoder: object
    image_encoder: object
    video_encoder: object
    llm: object


def build_backends(
    config: PipelineConfig, world: Optional[MockWorld] = None
) -> PipelineBackends:
    def descriptor(kind, endpoint, tag, embed=False):
        return BackendDescriptor(
            kind=kind,
            endpoint=endpoint,
            model_tag=tag,
            embed_dim=config.embed_dim if embed else None,
            timeout_s=config.timeout_s,
            max_inflight=config.max_inflight,
            max_retries=config.transport_retries,
            backoff_base_s=config.backoff_base_s,
            temperature=config.llm_temperature,
            max_tokens=config.llm_max_tokens,
        )

    return PipelineBackends(
        captioners={
            tag: make_backend(
                descriptor("captioner", config.captioner_endpoint, tag), world
            )
            for tag in config.captioner_models
        },
        text_encoder=make_backend(
            descriptor(
                "text_encoder", config.text_encoder_endpoint,
                config.text_encoder_model, embed=True,
            ),
            world,
        ),
        image_encoder=make_backend(
            descriptor(
                "image_encoder", config.image_encoder_endpoint,
                config.image_encoder_model, embed=True,
            ),
            world,
        ),
        video_encoder=make_backend(
            descriptor(
                "video_encoder", config.video_encoder_endpoint,
                config.video_encoder_model, embed=True,
            ),
            world,
        ),
        llm=make_backend(
            descriptor("llm", config.llm_endpoint, config.llm_model), world
        ),
    )


@dataclass
class StageStats:
    items: int = 0
    failures: int = 0

    def merge(self, other: "StageStats") -> None:
        self.items += other.items
        self.failures += other.failures


@dataclass
class VideoResult:
    series: ScoreSeries
    flags: List[str] = field(default_factory=list)
    stage_stats: Dict[str, StageStats] = field(default_factory=dict)


def _placeholder_unit(dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.float32)
    v[0] = 1.0
    return v


class _VideoRun:
    """Runs the stage sequence for one video against shared backends."""

    def __init__(
        self,
        meta: VideoMeta,
        manifest: DatasetManifest,
        config: PipelineConfig,
        backends: PipelineBackends,
        cache: StageCache,
        force: bool,
    ):
        self.meta = meta
        self.manifest = manifest
        self.config = config
        self.backends = backends
        self.cache = cache
        self.force = force
        self.lattice: SampledSequence = sample_frames(meta, config.stride)
        self.stats: Dict[str, StageStats] = {s: StageStats() for s in STAGES}
        self.flags: List[str] = []

    # -- helpers -----------------------------------------------------------

    def _cached(self, stage: str) -> Optional[List[dict]]:
        if self.force:
            self.cache.invalidate(stage, self.meta.video_id)
            return None
        if self.cache.is_complete(stage, self.meta.video_id):
            return self.cache.read_records(stage, self.meta.video_id)
        return None

    def _store(self, stage: str, records: List[dict]) -> None:
        self.cache.write_records(stage, self.meta.video_id, records)

    def _window(self, center: int) -> TemporalWindow:
        return summary.build_window(
            center,
            self.meta,
            self.lattice,
            self.config.window_seconds,
            self.config.frames_per_window,
        )

    # -- stage: captions ----------------------------------------------------

    def run_captions(self) -> List[dict]:
        cached = self._cached("captions")
        if cached is not None:
            return cached

        sources = list(
            dict.fromkeys((*self.config.pool_sources, self.config.primary_source))
        )
        records: List[dict] = []
        stats = self.stats["captions"]
        for frame_index in self.lattice.indices:
            ref = self.manifest.frame_ref(self.meta.video_id, frame_index)
            for source in sources:
                stats.items += 1
                try:
                    text = self.backends.captioners[source].caption(ref)
                except BackendError:
                    stats.failures += 1
                    continue
                records.append(
                    {"frame_index": frame_index, "source_id": source, "text": text}
                )
        records.sort(key=lambda r: (r["frame_index"], r["source_id"]))
        self._store("captions", records)
        return records

    # -- stage: cleaning ----------------------------------------------------

    def _caption_records(self, records: List[dict]) -> List[CaptionRecord]:
        return [
            CaptionRecord(
                video_id=self.meta.video_id,
                frame_index=r["frame_index"],
                source_id=r["source_id"],
                text=r["text"],
            )
            for r in records
        ]

    def _raw_primary(self, captions: List[CaptionRecord]) -> Dict[int, CaptionRecord]:
        """Primary-source caption per frame, with fallbacks for failures."""
        primary = self.config.primary_source
        by_frame: Dict[int, CaptionRecord] = {}
        for record in captions:
            if record.source_id == primary and record.frame_index not in by_frame:
                by_frame[record.frame_index] = record
        for record in sorted(captions, key=lambda c: (c.frame_index, c.source_id)):
            by_frame.setdefault(record.frame_index, record)
        for frame in self.lattice.indices:
            if frame in by_frame:
                continue
            # every caption for this frame failed: borrow the nearest one
            have = sorted(by_frame)
            if not have:
                break
            nearest = min(have, key=lambda f: (abs(f - frame), f))
            donor = by_frame[nearest]
            by_frame[frame] = CaptionRecord(
                video_id=donor.video_id,
                frame_index=frame,
                source_id=donor.source_id,
                text=donor.text,
            )
        return by_frame

    def run_cleaning(self, caption_records: List[dict]) -> cleaning.CleanedCaptions:
        captions = self._caption_records(caption_records)
        if not captions:
            raise RunAborted(
                f"{self.meta.video_id}: no captions survived the caption stage"
            )
        raw_primary = self._raw_primary(captions)

        cached = self._cached("cleaned")
        if cached is not None:
            return _cleaned_from_records(self.meta.video_id, cached)

        stats = self.stats["cleaned"]
        if self.config.skip_cleaning:
            entries = tuple(
                cleaning.CleanedEntry(
                    frame_index=f,
                    caption=raw_primary[f],
                    similarity=None,
                    cleaned=False,
                )
                for f in self.lattice.indices
            )
            cleaned = cleaning.CleanedCaptions(
                video_id=self.meta.video_id, entries=entries
            )
            self._store("cleaned", _cleaned_to_records(cleaned))
            return cleaned

        pool_captions = [
            c for c in captions if c.source_id in self.config.pool_sources
        ]
        pool = cleaning.build_pool(pool_captions, self.backends.text_encoder)

        image_embeddings: Dict[int, Optional[EmbeddingVector]] = {}
        for frame_index in self.lattice.indices:
            stats.items += 1
            ref = self.manifest.frame_ref(self.meta.video_id, frame_index)
            try:
                image_embeddings[frame_index] = self.backends.image_encoder.embed_image(
                    ref
                )
            except BackendError:
                stats.failures += 1
                image_embeddings[frame_index] = None

        cleaned = cleaning.clean_captions(self.lattice, image_embeddings, pool)
        uncleaned = sum(1 for e in cleaned.entries if not e.cleaned)
        if uncleaned:
            self.flags.append(f"uncleaned_frames={uncleaned}")

        self._store("cleaned", _cleaned_to_records(cleaned))
        self._write_cleaning_embeddings(pool, image_embeddings)
        return cleaned

    def _write_cleaning_embeddings(self, pool, image_embeddings) -> None:
        unique: Dict[str, np.ndarray] = {}
        for record, row in zip(pool.entries, pool.matrix):
            unique.setdefault(_text_key(record.text), row)
        write_embeddings(
            self.cache.embedding_path("cleaned", f"{self.meta.video_id}.pool_text"),
            list(unique.keys()),
            np.stack(list(unique.values())) if unique else np.zeros((0, 0), "f4"),
        )
        frames = [f for f in self.lattice.indices if image_embeddings.get(f) is not None]
        if frames:
            write_embeddings(
                self.cache.embedding_path("cleaned", f"{self.meta.video_id}.image"),
                [str(f) for f in frames],
                np.stack([image_embeddings[f].values for f in frames]),
            )

    # -- stage: summaries ---------------------------------------------------

    def run_summaries(
        self, cleaned: cleaning.CleanedCaptions
    ) -> Optional[List[summary.SummaryRecord]]:
        if self.config.skip_summary:
            return None
        cached = self._cached("summaries")
        if cached is not None:
            return [_summary_from_record(self.meta.video_id, r) for r in cached]

        stats = self.stats["summaries"]
        records: List[summary.SummaryRecord] = []
        for center in self.lattice.indices:
            stats.items += 1
            window = self._window(center)
            record = summary.summarize(
                window,
                cleaned,
                self.backends.llm,
                dedupe_consecutive=self.config.dedupe_window_captions,
            )
            if record.unsummarized:
                stats.failures += 1
            records.append(record)
        unsummarized = sum(1 for r in records if r.unsummarized)
        if unsummarized:
            self.flags.append(f"unsummarized_frames={unsummarized}")
        self._store("summaries", [_summary_to_record(r) for r in records])
        return records

    # -- stage: scores ------------------------------------------------------

    def run_scores(
        self,
        cleaned: cleaning.CleanedCaptions,
        summaries: Optional[List[summary.SummaryRecord]],
    ) -> Tuple[Tuple[float, ...], List[str]]:
        subjects = self._subjects(cleaned, summaries)
        cached = self._cached("scores")
        if cached is not None:
            elicitations = [
                scoring.ScoreElicitation(
                    subject_text=r["subject"],
                    raw_completion=r["raw_completion"],
                    parsed=r["parsed"],
                    attempts=r["attempts"],
                )
                for r in cached
            ]
        else:
            stats = self.stats["scores"]
            variant = scoring.PromptVariant(
                impersonation=self.config.impersonation,
                anomaly_prior=self.config.anomaly_prior,
            )
            elicitations = []
            for subject in subjects:
                stats.items += 1
                elicitation = scoring.score_text(
                    subject, variant, self.backends.llm, self.config.retry_limit
                )
                if elicitation.failed:
                    stats.failures += 1
                elicitations.append(elicitation)
            self._store(
                "scores",
                [
                    {
                        "frame_index": f,
                        "subject": e.subject_text,
                        "raw_completion": e.raw_completion,
                        "parsed": e.parsed,
                        "attempts": e.attempts,
                    }
                    for f, e in zip(self.lattice.indices, elicitations)
                ],
            )

        initial, all_failed = scoring.assemble_initial_scores(
            elicitations, self.lattice.indices
        )
        flags = ["all_scores_failed"] if all_failed else []
        return initial, flags

    def _subjects(self, cleaned, summaries) -> List[str]:
        if summaries is not None:
            return [r.text for r in summaries]
        by_frame = cleaned.as_dict()
        return [by_frame[f].caption.text for f in self.lattice.indices]

    # -- stage: refinement ----------------------------------------------------

    def run_refinement(
        self,
        initial: Tuple[float, ...],
        cleaned: cleaning.CleanedCaptions,
        summaries: Optional[List[summary.SummaryRecord]],
    ) -> Optional[Tuple[float, ...]]:
        if self.config.skip_refinement:
            return None
        cached = self._cached("refined")
        if cached is not None:
            return tuple(r["refined"] for r in cached)

        stats = self.stats["refined"]
        subjects = self._subjects(cleaned, summaries)
        root = self.manifest.snippet_root(self.meta.video_id)
        dim = self.config.embed_dim

        snippet_rows, summary_rows, ok = [], [], []
        for position, center in enumerate(self.lattice.indices):
            stats.items += 1
            window = (
                summaries[position].window if summaries is not None
                else self._window(center)
            )
            try:
                snippet = self.backends.video_encoder.embed_video(window, root)
                text_emb = self.backends.text_encoder.embed_text(subjects[position])
            except BackendError:
                stats.failures += 1
                snippet_rows.append(_placeholder_unit(dim))
                summary_rows.append(_placeholder_unit(dim))
                ok.append(False)
                continue
            snippet_rows.append(snippet.values)
            summary_rows.append(text_emb.values)
            ok.append(True)

        inputs = refinement.RefinementInputs(
            snippet_matrix=np.stack(snippet_rows),
            summary_matrix=np.stack(summary_rows),
            initial=initial,
            k=self.config.neighbors,
        )
        mask = None if all(ok) else ok
        if mask is not None:
            self.flags.append(f"unrefined_frames={ok.count(False)}")
        refined = refinement.refine(inputs, candidate_mask=mask)

        self._store(
            "refined",
            [
                {"frame_index": f, "initial": a, "refined": r}
                for f, a, r in zip(self.lattice.indices, initial, refined)
            ],
        )
        write_embeddings(
            self.cache.embedding_path("refined", f"{self.meta.video_id}.snippet"),
            [str(f) for f in self.lattice.indices],
            inputs.snippet_matrix,
        )
        write_embeddings(
            self.cache.embedding_path("refined", f"{self.meta.video_id}.summary_text"),
            [str(f) for f in self.lattice.indices],
            inputs.summary_matrix,
        )
        return refined

    # -- drive ---------------------------------------------------------------

    def run(self) -> VideoResult:
        caption_records = self.run_captions()
        cleaned = self.run_cleaning(caption_records)
        summaries = self.run_summaries(cleaned)
        initial, score_flags = self.run_scores(cleaned, summaries)
        self.flags.extend(score_flags)
        refined = self.run_refinement(initial, cleaned, summaries)
        series = ScoreSeries(
            video_id=self.meta.video_id,
            frame_indices=self.lattice.indices,
            initial=initial,
            refined=refined,
        )
        return VideoResult(series=series, flags=self.flags, stage_stats=self.stats)


# -- record (de)serialization ---------------------------------------------


def _text_key(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:24]


def _cleaned_to_records(cleaned: cleaning.CleanedCaptions) -> List[dict]:
    return [
        {
            "frame_index": e.frame_index,
            "caption": {
                "frame_index": e.caption.frame_index,
                "source_id": e.caption.source_id,
                "text": e.caption.text,
            },
            "similarity": e.similarity,
            "cleaned": e.cleaned,
        }
        for e in cleaned.entries
    ]


def _cleaned_from_records(video_id: str, records: List[dict]) -> cleaning.CleanedCaptions:
    entries = tuple(
        cleaning.CleanedEntry(
            frame_index=r["frame_index"],
            caption=CaptionRecord(
                video_id=video_id,
                frame_index=r["caption"]["frame_index"],
                source_id=r["caption"]["source_id"],
                text=r["caption"]["text"],
            ),
            similarity=r["similarity"],
            cleaned=r["cleaned"],
        )
        for r in records
    )
    return cleaning.CleanedCaptions(video_id=video_id, entries=entries)


def _summary_to_record(record: summary.SummaryRecord) -> dict:
    return {
        "center_frame": record.center_frame,
        "text": record.text,
        "start_s": record.window.start_s,
        "end_s": record.window.end_s,
        "member_frames": list(record.window.member_frames),
        "unsummarized": record.unsummarized,
    }


def _summary_from_record(video_id: str, r: dict) -> summary.SummaryRecord:
    window = TemporalWindow(
        video_id=video_id,
        center_frame=r["center_frame"],
        start_s=r["start_s"],
        end_s=r["end_s"],
        member_frames=tuple(r["member_frames"]),
    )
    return summary.SummaryRecord(
        video_id=video_id,
        center_frame=r["center_frame"],
        text=r["text"],
        window=window,
        unsummarized=r["unsummarized"],
    )


# -- whole-run entry points --------------------------------------------------


def run_pipeline(
    manifest: DatasetManifest,
    config: PipelineConfig,
    cache_root: Path | str,
    out_dir: Optional[Path | str] = None,
    force: bool = False,
    write_curves: bool = False,
) -> evaluation.EvaluationReport:
    fingerprint = config_fingerprint(config)
    cache = StageCache(cache_root, manifest.dataset, fingerprint)
    world = (
        MockWorld.from_file(manifest.mock_world_path)
        if manifest.mock_world_path
        else MockWorld()
    )
    backends = build_backends(config, world)

    def worker(meta: VideoMeta) -> VideoResult:
        return _VideoRun(meta, manifest, config, backends, cache, force).run()

    if config.workers > 1 and len(manifest.videos) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(worker, manifest.videos))
    else:
        results = [worker(meta) for meta in manifest.videos]

    totals: Dict[str, StageStats] = {s: StageStats() for s in STAGES}
    for result in results:
        for stage, stats in result.stage_stats.items():
            totals[stage].merge(stats)
    for stage, stats in totals.items():
        if stats.items and stats.failures / stats.items > config.max_failure_fraction:
            raise RunAborted(
                f"stage {stage!r}: {stats.failures}/{stats.items} items failed "
                f"(limit {config.max_failure_fraction:.0%})"
            )

    ground_truth = _load_ground_truth(manifest)
    report = _evaluate_results(manifest, config, fingerprint, results, ground_truth)

    if out_dir is not None:
        _write_outputs(
            Path(out_dir), manifest, config, report, results, ground_truth,
            write_curves,
        )
    return report


def _load_ground_truth(manifest: DatasetManifest) -> Optional[Dict[str, GroundTruth]]:
    if manifest.annotations_path is None:
        return None
    ground_truth = ingest_annotations(
        manifest.annotations_path, manifest.annotation_format
    )
    _validate_expected_counts(manifest, ground_truth)
    return ground_truth


def _validate_expected_counts(
    manifest: DatasetManifest, ground_truth: Dict[str, GroundTruth]
) -> None:
    """Check declared normal/anomalous composition against the annotations."""
    from .manifest import ManifestError

    expected = manifest.expected_counts
    if not expected:
        return
    anomalous = sum(
        1
        for meta in manifest.videos
        if ground_truth.get(meta.video_id)
        and ground_truth[meta.video_id].intervals
    )
    normal = len(manifest.videos) - anomalous
    for key, actual in (("anomalous", anomalous), ("normal", normal)):
        if key in expected and expected[key] != actual:
            raise ManifestError(
                f"manifest expects {expected[key]} {key} videos, "
                f"annotations yield {actual}"
            )


def _evaluate_results(
    manifest: DatasetManifest,
    config: PipelineConfig,
    fingerprint: str,
    results: Sequence[VideoResult],
    ground_truth: Optional[Dict[str, GroundTruth]],
) -> evaluation.EvaluationReport:
    per_video: Dict[str, dict] = {}
    all_scores: List[np.ndarray] = []
    all_labels: List[np.ndarray] = []
    flags: Dict[str, List[str]] = {}

    for meta, result in zip(manifest.videos, results):
        scores = evaluation.expand_scores(result.series, meta, config.expansion)
        entry = {
            "num_frames": meta.num_frames,
            "mean_score": float(np.mean(scores)),
        }
        if ground_truth is not None:
            gt = ground_truth.get(
                meta.video_id, GroundTruth(video_id=meta.video_id, intervals=())
            )
            labels = labels_from_intervals(gt, meta.num_frames)
            entry["anomalous_frames"] = int(labels.sum())
            all_scores.append(scores)
            all_labels.append(labels)
        per_video[meta.video_id] = entry
        if result.flags:
            flags[meta.video_id] = result.flags

    auc = ap = None
    num_frames = sum(m.num_frames for m in manifest.videos)
    if ground_truth is not None:
        scores = np.concatenate(all_scores)
        labels = np.concatenate(all_labels)
        try:
            auc = evaluation.roc_auc(scores, labels)
        except evaluation.MetricUndefinedError:
            auc = None
        try:
            ap = evaluation.average_precision(scores, labels)
        except evaluation.MetricUndefinedError:
            ap = None

    return evaluation.EvaluationReport(
        dataset=manifest.dataset,
        config_fingerprint=fingerprint,
        roc_auc=auc,
        average_precision=ap,
        num_videos=len(manifest.videos),
        num_frames=num_frames,
        per_video=per_video,
        flags=flags,
    )


def _write_outputs(
    out_dir: Path,
    manifest: DatasetManifest,
    config: PipelineConfig,
    report: evaluation.EvaluationReport,
    results: Sequence[VideoResult],
    ground_truth: Optional[Dict[str, GroundTruth]],
    write_curves: bool,
) -> None:
    scores_dir = out_dir / "scores"
    scores_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report.to_json(), encoding="utf-8")

    for meta, result in zip(manifest.videos, results):
        series = result.series
        payload = {
            "video_id": meta.video_id,
            "num_frames": meta.num_frames,
            "fps": meta.fps,
            "stride": config.stride,
            "frame_indices": list(series.frame_indices),
            "initial": list(series.initial),
            "refined": list(series.refined) if series.refined else None,
        }
        (scores_dir / f"{meta.video_id}.json").write_text(
            json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8"
        )

    if write_curves and ground_truth is not None:
        curves_dir = out_dir / "curves"
        curves_dir.mkdir(parents=True, exist_ok=True)
        for meta, result in zip(manifest.videos, results):
            scores = evaluation.expand_scores(result.series, meta, config.expansion)
            gt = ground_truth.get(
                meta.video_id, GroundTruth(video_id=meta.video_id, intervals=())
            )
            labels = labels_from_intervals(gt, meta.num_frames)
            lines = ["frame_index,score,label"]
            lines += [
                f"{i},{scores[i]:.6f},{int(labels[i])}"
                for i in range(meta.num_frames)
            ]
            (curves_dir / f"{meta.video_id}.csv").write_text(
                "\n".join(lines) + "\n", encoding="utf-8"
            )


#: Sweep axes and the Table rows they reproduce.
SWEEP_AXES = ("k", "tn", "prompt", "components")

TN_ROWS = ((2.5, 10), (5.0, 10), (10.0, 10), (20.0, 10), (10.0, 5), (10.0, 20))
DEFAULT_K_VALUES = (1, 3, 5, 7, 9, 10)


def sweep_settings(
    config: PipelineConfig,
    axis: str,
    k_values: Sequence[int] = DEFAULT_K_VALUES,
) -> List[Tuple[str, PipelineConfig]]:
    if axis == "k":
        return [
            (f"k={k}", dataclasses.replace(config, neighbors=k)) for k in k_values
        ]
    if axis == "tn":
        return [
            (
                f"t={t:g},n={n}",
                dataclasses.replace(
                    config, window_seconds=t, frames_per_window=n
                ),
            )
            for t, n in TN_ROWS
        ]
    if axis == "prompt":
        rows = [(False, False), (True, False), (False, True), (True, True)]
        return [
            (
                f"prior={int(prior)},impersonation={int(imp)}",
                dataclasses.replace(
                    config, anomaly_prior=prior, impersonation=imp
                ),
            )
            for prior, imp in rows
        ]
    if axis == "components":
        return [
            ("skip-cleaning", dataclasses.replace(config, skip_cleaning=True)),
            ("skip-summary", dataclasses.replace(config, skip_summary=True)),
            ("skip-refinement", dataclasses.replace(config, skip_refinement=True)),
            ("full", config),
        ]
    raise VadError(f"unknown sweep axis {axis!r} (expected one of {SWEEP_AXES})")


def ablation_sweep(
    manifest: DatasetManifest,
    config: PipelineConfig,
    axis: str,
    cache_root: Path | str,
    out_dir: Optional[Path | str] = None,
    force: bool = False,
    k_values: Sequence[int] = DEFAULT_K_VALUES,
) -> List[Tuple[str, evaluation.EvaluationReport]]:
    """One report per axis setting, each cached under its own fingerprint."""
    reports = []
    for label, setting in sweep_settings(config, axis, k_values):
        sub_dir = Path(out_dir) / label.replace(",", "_") if out_dir else None
        reports.append(
            (label, run_pipeline(manifest, setting, cache_root, sub_dir, force))
        )
    return reports


def evaluate_scores(
    scores_dir: Path | str,
    annotations_path: Path | str,
    annotation_format: str = "ucf_interval",
    expansion: str = "nearest",
) -> dict:
    """Recompute frame-level metrics from previously emitted score files."""
    scores_dir = Path(scores_dir)
    files = sorted(scores_dir.glob("*.json"))
    if not files:
        raise VadError(f"no score files found under {scores_dir}")
    ground_truth = ingest_annotations(annotations_path, annotation_format)

    all_scores, all_labels = [], []
    for file in files:
        payload = json.loads(file.read_text(encoding="utf-8"))
        values = payload["refined"] or payload["initial"]
        expanded = evaluation.expand_lattice(
            payload["frame_indices"], values, payload["num_frames"], expansion
        )
        gt = ground_truth.get(
            payload["video_id"],
            GroundTruth(video_id=payload["video_id"], intervals=()),
        )
        all_scores.append(expanded)
        all_labels.append(labels_from_intervals(gt, payload["num_frames"]))

    scores = np.concatenate(all_scores)
    labels = np.concatenate(all_labels)
    return {
        "num_videos": len(files),
        "num_frames": int(labels.size),
        "roc_auc": evaluation.roc_auc(scores, labels),
        "average_precision": evaluation.average_precision(scores, labels),
    }
