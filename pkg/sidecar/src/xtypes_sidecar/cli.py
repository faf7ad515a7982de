"""Command line entry point for the encoder sidecar.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 model or
training failure.  These match the pipeline CLI's convention.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .encoder import (
    ConfigError,
    DataError,
    EncodeJob,
    ModelError,
    POOLING_MODES,
    encode_descriptions,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xtypes-encode",
        description="Encode type description documents into an embedding file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    encode = sub.add_parser("encode", help="encode a documents file")
    encode.add_argument("--in", dest="input_path", required=True, metavar="DOCUMENTS")
    encode.add_argument("--out", dest="output_path", required=True, metavar="EMBEDDINGS")
    encode.add_argument("--model", required=True, help="encoder name or local path")
    encode.add_argument("--pool", choices=POOLING_MODES, default="mean")
    encode.add_argument("--max-len", dest="max_length", type=int, default=512)
    encode.add_argument("--seed", type=int, default=0)
    encode.add_argument(
        "--finetune",
        action="store_true",
        help="train a question-to-cluster classifier before encoding",
    )
    encode.add_argument("--questions", help="question dataset JSON (with --finetune)")
    encode.add_argument("--labels", help="question_id<TAB>cluster file (with --finetune)")
    encode.add_argument("--epochs", type=int, default=1)
    encode.add_argument("--lr", dest="learning_rate", type=float, default=3e-5)
    encode.add_argument("--batch-size", type=int, default=8)
    return parser


def _quiet_transformers() -> None:
    try:
        from transformers import logging as hf_logging

        hf_logging.set_verbosity_error()
        hf_logging.disable_progress_bar()
    except Exception:
        pass


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    _quiet_transformers()
    args = build_parser().parse_args(argv)
    job = EncodeJob(
        input_path=args.input_path,
        output_path=args.output_path,
        model_name=args.model,
        max_length=args.max_length,
        pooling=args.pool,
        finetune=args.finetune,
        questions_path=args.questions,
        labels_path=args.labels,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    try:
        out_path = encode_descriptions(job)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
