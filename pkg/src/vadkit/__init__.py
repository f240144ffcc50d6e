"""Training-free video anomaly detection over pluggable model backends.

The pipeline captions sampled frames, cleans captions by cross-modal
similarity, summarizes temporal windows with an LLM, elicits discrete
anomaly scores, refines them by softmax-weighted aggregation over the
nearest summaries, and evaluates frame-level ROC AUC / AP.
"""
from .backends import (
    BackendDescriptor,
    BackendError,
    BackendPermanentError,
    BackendRetryableError,
    FrameRef,
    HttpBackend,
    make_backend,
)
from .baselines import PromptPair, run_zs_baseline, zs_two_prompt_score
from .cache import StageCache, config_fingerprint, read_embeddings, write_embeddings
from .cleaning import CaptionPool, CleanedCaptions, build_pool, clean_captions
from .core import (
    AnnotationError,
    CaptionRecord,
    ConfigError,
    EmbeddingVector,
    GroundTruth,
    MetricUndefinedError,
    PipelineConfig,
    SampledSequence,
    ScoreSeries,
    TemporalWindow,
    VadError,
    VideoMeta,
    labels_from_intervals,
    sample_frames,
)
from .evaluation import (
    EvaluationReport,
    average_precision,
    expand_lattice,
    expand_scores,
    roc_auc,
    threshold_detections,
)
from .manifest import DatasetManifest, ingest_annotations, load_manifest
from .mock_backends import MockBackend, MockWorld
from .pipeline import ablation_sweep, evaluate_scores, run_pipeline
from .refinement import (
    RefinementInputs,
    refine,
    softmax_weighted_mean,
    top_k_summaries,
)
from .scoring import (
    PromptVariant,
    ScoreElicitation,
    assemble_initial_scores,
    parse_score,
    render_context_prompt,
    score_text,
)
from .summary import SummaryRecord, build_window, summarize

__version__ = "0.1.0"
