"""Command-line interface: full pipeline plus per-stage subcommands."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import (
    CliqueCapError,
    DimensionError,
    IncompleteScheduleError,
    InputError,
    InternalConsistencyError,
    ParseError,
)
from .features import DEFAULT_CLIQUE_CAP
from .ingest import IngestConfig
from .pipeline import ALL_FORMATS, STAGES, PipelineConfig, run_pipeline, run_stage
from .relations import RelationConfig

ENV_CLIQUE_CAP = "SCRAMBLEGRAPH_CLIQUE_CAP"

_USAGE_ERRORS = (ParseError, InputError, DimensionError, IncompleteScheduleError, ValueError)
_INVARIANT_ERRORS = (CliqueCapError, InternalConsistencyError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scramblegraph",
        description=(
            "Convert scrambled gene-segment annotations into labeled directed "
            "graphs, embed them as invariant vectors, and cluster the result."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ["pipeline", *STAGES]:
        cmd = sub.add_parser(name, help="run all stages" if name == "pipeline" else f"run the {name} stage")
        cmd.add_argument("--input", type=Path, help="annotation file (pipeline/ingest)")
        cmd.add_argument("--out", type=Path, required=True, help="output directory")
        cmd.add_argument("--overlap-min", type=int, default=20, metavar="BP")
        cmd.add_argument("--containment-margin", type=int, default=5, metavar="BP")
        cmd.add_argument("--interleave-slack", type=int, default=5, metavar="BP")
        cmd.add_argument("--merge-gap", type=int, default=0, metavar="BP")
        cmd.add_argument(
            "--keep-distant-overlaps",
            action="store_true",
            help="do not exclude MAC contigs with distant overlapping segments",
        )
        cmd.add_argument("--eps-step", type=float, default=0.5)
        cmd.add_argument("--eps-report", type=float, action="append", default=[], metavar="EPS")
        cmd.add_argument("--global-only", action="store_true", help="3-entry global vectors only")
        cmd.add_argument("--gff3", action="store_true", help="input is 9-column GFF3")
        cmd.add_argument(
            "--format",
            action="append",
            choices=sorted(ALL_FORMATS),
            default=[],
            help="optional export format to produce (repeatable; default: all)",
        )
    return parser


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    cap = DEFAULT_CLIQUE_CAP
    env_cap = os.environ.get(ENV_CLIQUE_CAP)
    if env_cap is not None:
        try:
            cap = int(env_cap)
        except ValueError:
            raise InputError(f"{ENV_CLIQUE_CAP} must be an integer, got {env_cap!r}") from None
    return PipelineConfig(
        input_path=args.input,
        out_dir=args.out,
        relation=RelationConfig(
            overlap_min_bp=args.overlap_min,
            containment_margin_bp=args.containment_margin,
            interleave_slack_bp=args.interleave_slack,
        ),
        ingest=IngestConfig(
            merge_gap_max=args.merge_gap,
            exclude_distant_overlap=not args.keep_distant_overlaps,
        ),
        eps_step=args.eps_step,
        eps_report=tuple(args.eps_report),
        global_only=args.global_only,
        formats=frozenset(args.format) if args.format else ALL_FORMATS,
        gff3=args.gff3,
        clique_cap=cap,
    )


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "pipeline":
            written = run_pipeline(config)
        else:
            written = run_stage(args.command, config)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _INVARIANT_ERRORS as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    print(f"{args.command}: wrote {len(written)} artifacts to {config.out_dir}")
    return 0


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
