"""Command-line entry point.

Subcommands mirror the pipeline stages (convert-nt, ingest, build-repr,
cluster, train, predict, evaluate) plus the orchestrators (run, sweep).
Settings come from an INI-style config file; command-line flags override
file values.  Exit codes: 0 success, 2 configuration error, 3 data error,
4 stage failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError, DataError, StageError
from .evaluate import MODES
from .ntriples import PredicateConfig, convert_ntriples
from .pipeline import (
    PRIMARY_METRIC_KEY,
    PipelineConfig,
    cmd_run,
    cmd_sweep,
    ingest_summary,
    load_config_file,
    run_stages,
)
from .type_repr import MATRIX_KINDS

log = logging.getLogger(__name__)

_STAGE_COMMANDS = {
    "build-repr": "repr",
    "cluster": "cluster",
    "train": "train",
    "predict": "predict",
    "evaluate": "evaluate",
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="INI config file; flags override its values")
    parser.add_argument("--kg", help="directory with the KG tables")
    parser.add_argument("--train", help="training questions JSON")
    parser.add_argument("--test", help="test questions JSON")
    parser.add_argument("--artifacts", help="artifact directory (default ./artifacts)")
    parser.add_argument("--embedding", help="embedding file for loaded/description kinds")
    parser.add_argument("--external-scores", help="cluster score file from an external matcher")
    parser.add_argument("--repr", choices=MATRIX_KINDS, help="type representation kind")
    parser.add_argument("--k", type=int, help="number of type clusters")
    parser.add_argument("--b", type=int, help="clusters opened per question at prediction")
    parser.add_argument("--k-out", type=int, help="ranked types kept per question")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--metric", choices=sorted(PRIMARY_METRIC_KEY), help="headline metric")
    parser.add_argument("--mode", choices=MODES, help="evaluation mode")


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config_file(args.config) if args.config else PipelineConfig()
    overrides = {
        "kg_dir": args.kg,
        "train_json": args.train,
        "test_json": args.test,
        "artifacts": args.artifacts,
        "embedding_file": args.embedding,
        "external_scores": args.external_scores,
        "repr_kind": getattr(args, "repr"),
        "k": args.k,
        "b": args.b,
        "k_out": args.k_out,
        "seed": args.seed,
        "metric": args.metric,
        "mode": args.mode,
    }
    present = {key: value for key, value in overrides.items() if value is not None}
    if present:
        config = dataclasses.replace(config, **present)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xtypes",
        description="Answer-type prediction: coarse category plus ranked KG types.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    convert = commands.add_parser("convert-nt", help="convert N-Triples dumps to the KG tables")
    convert.add_argument("inputs", nargs="+", help="N-Triples files")
    convert.add_argument("--out", required=True, help="output KG directory")
    convert.add_argument("--type-predicate", help="IRI asserting entity type membership")
    convert.add_argument("--subclass-predicate", help="IRI of the subclass relation")
    convert.add_argument("--label-predicate", help="IRI of the label relation")
    convert.add_argument("--description-predicate", help="IRI of the description relation")
    convert.add_argument(
        "--prefix",
        action="append",
        default=[],
        metavar="SHORT=IRI",
        help="namespace compaction rule; repeatable",
    )

    ingest = commands.add_parser("ingest", help="validate KG tables and question files")
    _add_config_flags(ingest)

    for name, help_text in (
        ("build-repr", "build the type representation matrix"),
        ("cluster", "group type vectors into clusters"),
        ("train", "train matcher, rankers, fusion, and category classifier"),
        ("predict", "rank types for the test questions"),
        ("evaluate", "score predictions against gold annotations"),
        ("run", "run every stage end to end"),
    ):
        sub = commands.add_parser(name, help=help_text)
        _add_config_flags(sub)

    sweep = commands.add_parser("sweep", help="pick the cluster count on a validation split")
    _add_config_flags(sweep)
    sweep.add_argument(
        "--ks", default="32,64,128", help="comma-separated cluster counts to try"
    )

    return parser


def _cmd_convert(args: argparse.Namespace) -> int:
    overrides = {}
    if args.type_predicate:
        overrides["type_assertion"] = (args.type_predicate,)
    if args.subclass_predicate:
        overrides["subclass"] = (args.subclass_predicate,)
    if args.label_predicate:
        overrides["label"] = (args.label_predicate,)
    if args.description_predicate:
        overrides["description"] = (args.description_predicate,)
    prefixes = {}
    for rule in args.prefix:
        short, sep, iri = rule.partition("=")
        if not sep or not short or not iri:
            raise ConfigError(f"--prefix needs SHORT=IRI, got {rule!r}")
        prefixes[short] = iri
    config = PredicateConfig(**overrides, prefixes=prefixes)
    counts = convert_ntriples([Path(p) for p in args.inputs], Path(args.out), config)
    for name in sorted(counts):
        print(f"{name}: {counts[name]} rows")
    return 0


def _parse_ks(raw: str) -> list[int]:
    try:
        ks = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--ks must be comma-separated integers, got {raw!r}") from exc
    if not ks:
        raise ConfigError("--ks must name at least one cluster count")
    return ks


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "convert-nt":
            return _cmd_convert(args)
        config = _build_config(args)
        if args.command == "ingest":
            summary = ingest_summary(config)
            print(json.dumps(summary, indent=2, sort_keys=True))
            return 0
        if args.command in _STAGE_COMMANDS:
            statuses = run_stages(config, upto=_STAGE_COMMANDS[args.command])
            for stage, status in statuses.items():
                print(f"{stage}: {status}")
            if args.command == "evaluate":
                print((Path(config.artifacts) / "report.txt").read_text(), end="")
            return 0
        if args.command == "run":
            statuses, reports = cmd_run(config)
            for stage, status in statuses.items():
                print(f"{stage}: {status}")
            print((Path(config.artifacts) / "report.txt").read_text(), end="")
            primary = PRIMARY_METRIC_KEY[config.metric]
            value = reports[config.mode].metric_means[primary]
            print(f"{primary} ({config.mode}): {value:.4f}")
            return 0
        if args.command == "sweep":
            summary = cmd_sweep(config, _parse_ks(args.ks))
            print((Path(config.artifacts) / "sweep.txt").read_text(), end="")
            print(f"winner: k={summary['winner']}")
            return 0
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except DataError as exc:
        log.error("%s", exc)
        return 3
    except StageError as exc:
        log.error("%s", exc)
        return 4
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
