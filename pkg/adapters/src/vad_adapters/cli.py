"""Adapter launcher: one kind per process, with a --probe mode that
prints what would be served and exits."""
from __future__ import annotations

import argparse
import json
import sys

from .engines import KINDS, EngineError, load_engines
from .server import AdapterConfig, serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vad-adapter", description=__doc__)
    parser.add_argument("kind", choices=list(KINDS))
    parser.add_argument(
        "--checkpoint", default="builtin",
        help="checkpoint identifier (default: deterministic builtin engines)",
    )
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument(
        "--embed-dim", type=int, default=None,
        help="embedding dimension for encoder kinds (builtin default: 512)",
    )
    parser.add_argument(
        "--probe", action="store_true",
        help="print kind, model tags and embed dim, then exit",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = AdapterConfig(
        kind=args.kind,
        checkpoint=args.checkpoint,
        device=args.device,
        port=args.port,
        embed_dim=args.embed_dim,
    )
    if args.probe:
        try:
            engines = load_engines(config.kind, config.checkpoint, config.embed_dim)
        except EngineError as exc:
            print(f"fatal: {exc}", file=sys.stderr)
            return 2
        print(
            json.dumps(
                {
                    "kind": config.kind,
                    "checkpoint": config.checkpoint,
                    "model_tags": engines.model_tags,
                    "embed_dim": engines.embed_dim,
                },
                indent=2,
            )
        )
        return 0
    serve(config)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
