"""Command-line entry point.

    anisotable <experiment> --config cfg.json [--seed N] [--workers K] [--out DIR]
    anisotable replay --manifest path/to/manifest.json

ANISOTABLE_WORKERS serves as the fallback for --workers.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import AnisotableError
from .harness import EXPERIMENTS, ExperimentConfig, replay, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anisotable")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENTS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
    p = sub.add_parser("replay", help="verify byte-identical regeneration")
    p.add_argument("--manifest", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            warnings = replay(args.manifest)
            for w in warnings:
                print(f"warning: {w}", file=sys.stderr)
            print("replay: byte-identical")
            return 0
        spec = json.loads(Path(args.config).read_text())
        if spec.get("experiment", args.command) != args.command:
            raise AnisotableError(
                f"config is for {spec.get('experiment')!r}, invoked as {args.command!r}"
            )
        spec["experiment"] = args.command
        if args.seed is not None:
            spec["master_seed"] = args.seed
        if args.workers is not None:
            spec["workers"] = args.workers
        out_dir = args.out or spec.get("out_dir") or "out"
        spec.pop("out_dir", None)
        cfg = ExperimentConfig.from_dict(spec)
        manifest = run(cfg, out_dir)
        print(json.dumps({"out_dir": str(out_dir), "totals": manifest["totals"]}))
        return 0
    except AnisotableError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
