"""Command-line entry point for the defect-phonon dephasing pipeline."""

from __future__ import annotations

import argparse
import sys

from .config import RunConfig, load_config
from .pipeline import Stage, run_pipeline

_STAGES = [s.value for s in Stage]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dephonon",
        description=(
            "Simulate the dephasing dynamics of a two-spin defect in a 1D "
            "phonon chain and compute its non-Markovianity measures."
        ),
    )
    sub = parser.add_subparsers(dest="stage", required=True, metavar="STAGE")
    for name in _STAGES:
        p = sub.add_parser(name, help=f"run the {name} stage")
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument(
            "--stage-cache",
            help="directory for reusable intermediate artifacts",
        )
        p.add_argument("--threads", type=int, default=1, help="sweep parallelism")
        p.add_argument(
            "--seed",
            type=int,
            help="recorded in the manifest (the pipeline is deterministic)",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else RunConfig()
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        run_pipeline(
            config,
            Stage(args.stage),
            args.out,
            cache_dir=args.stage_cache,
            threads=args.threads,
            seed=args.seed,
        )
    except Exception as exc:  # noqa: BLE001 - single reporting point
        print(f"pipeline error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
