"""Command-line surface: run, evaluate, sweep, baseline zs.

Every run flag can also be set in a TOML config file (flat key = value,
same names with underscores); explicit command-line flags win over the
file, which wins over built-in defaults.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .baselines import run_zs_baseline
from .core import ConfigError, PipelineConfig, VadError
from .manifest import load_manifest
from .pipeline import (
    DEFAULT_K_VALUES,
    SWEEP_AXES,
    ablation_sweep,
    evaluate_scores,
    run_pipeline,
)

_CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(PipelineConfig)}


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {value!r}")


def load_config(path: Path | str | None, overrides: dict) -> PipelineConfig:
    """Defaults, then the TOML file, then explicit flag overrides."""
    values: dict = {}
    if path is not None:
        raw = tomllib.loads(Path(path).read_text(encoding="utf-8"))
        for key, value in raw.items():
            if key not in _CONFIG_FIELDS:
                raise ConfigError(f"unknown config key {key!r} in {path}")
            if key == "captioner_models":
                value = tuple(value)
            values[key] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**values)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="TOML config file")
    parser.add_argument("--stride", type=int)
    parser.add_argument("--window-seconds", dest="window_seconds", type=float)
    parser.add_argument(
        "--frames-per-window", dest="frames_per_window", type=int
    )
    parser.add_argument("--k", dest="neighbors", type=int)
    parser.add_argument("--impersonation", type=_parse_bool, metavar="BOOL")
    parser.add_argument(
        "--anomaly-prior", dest="anomaly_prior", type=_parse_bool, metavar="BOOL"
    )
    parser.add_argument(
        "--pooling", help='caption pooling: "ensemble" or "single:SOURCE"'
    )
    parser.add_argument("--workers", type=int)


def _config_from_args(args: argparse.Namespace, **extra) -> PipelineConfig:
    overrides = {
        "stride": args.stride,
        "window_seconds": args.window_seconds,
        "frames_per_window": args.frames_per_window,
        "neighbors": args.neighbors,
        "impersonation": args.impersonation,
        "anomaly_prior": args.anomaly_prior,
        "pooling": args.pooling,
        "workers": args.workers,
    }
    overrides.update(extra)
    return load_config(args.config, overrides)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(
        args,
        skip_cleaning=args.skip_cleaning or None,
        skip_summary=args.skip_summary or None,
        skip_refinement=args.skip_refinement or None,
    )
    manifest = load_manifest(args.manifest)
    report = run_pipeline(
        manifest,
        config,
        cache_root=args.cache,
        out_dir=args.out,
        force=args.force,
        write_curves=args.curves,
    )
    print(report.to_json(), end="")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    result = evaluate_scores(
        args.scores, args.annotations, args.format, args.expansion
    )
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    manifest = load_manifest(args.manifest)
    k_values = (
        tuple(int(v) for v in args.k_values.split(","))
        if args.k_values
        else DEFAULT_K_VALUES
    )
    reports = ablation_sweep(
        manifest,
        config,
        axis=args.axis,
        cache_root=args.cache,
        out_dir=args.out,
        force=args.force,
        k_values=k_values,
    )
    table = [
        {
            "setting": label,
            "config_fingerprint": report.config_fingerprint,
            "roc_auc": report.roc_auc,
            "average_precision": report.average_precision,
        }
        for label, report in reports
    ]
    print(json.dumps(table, indent=2))
    return 0


def _cmd_baseline_zs(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    manifest = load_manifest(args.manifest)
    result = run_zs_baseline(manifest, config, modality=args.modality)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(
            json.dumps(result, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    summary = {k: v for k, v in result.items() if k != "per_video"}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vadkit",
        description="Training-free video anomaly detection pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the full pipeline on a manifest")
    run_p.add_argument("--manifest", required=True)
    run_p.add_argument("--cache", required=True, help="stage cache directory")
    run_p.add_argument("--out", help="output directory for report and scores")
    run_p.add_argument("--skip-cleaning", action="store_true")
    run_p.add_argument("--skip-summary", action="store_true")
    run_p.add_argument("--skip-refinement", action="store_true")
    run_p.add_argument("--force", action="store_true", help="recompute cached stages")
    run_p.add_argument("--curves", action="store_true", help="write per-video CSVs")
    _add_config_flags(run_p)
    run_p.set_defaults(func=_cmd_run)

    eval_p = sub.add_parser("evaluate", help="recompute metrics from score files")
    eval_p.add_argument("--scores", required=True, help="directory of score JSONs")
    eval_p.add_argument("--annotations", required=True)
    eval_p.add_argument(
        "--format", default="ucf_interval", choices=["ucf_interval", "xd_interval"]
    )
    eval_p.add_argument("--expansion", default="nearest", choices=["nearest", "hold"])
    eval_p.set_defaults(func=_cmd_evaluate)

    sweep_p = sub.add_parser("sweep", help="run an ablation axis")
    sweep_p.add_argument("--axis", required=True, choices=list(SWEEP_AXES))
    sweep_p.add_argument("--manifest", required=True)
    sweep_p.add_argument("--cache", required=True)
    sweep_p.add_argument("--out")
    sweep_p.add_argument("--force", action="store_true")
    sweep_p.add_argument(
        "--k-values", help="comma-separated K values for the k axis"
    )
    _add_config_flags(sweep_p)
    sweep_p.set_defaults(func=_cmd_sweep)

    baseline_p = sub.add_parser("baseline", help="training-free baselines")
    baseline_sub = baseline_p.add_subparsers(dest="baseline", required=True)
    zs_p = baseline_sub.add_parser("zs", help="zero-shot two-prompt baseline")
    zs_p.add_argument("--modality", required=True, choices=["image", "video"])
    zs_p.add_argument("--manifest", required=True)
    zs_p.add_argument("--out")
    _add_config_flags(zs_p)
    zs_p.set_defaults(func=_cmd_baseline_zs)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
