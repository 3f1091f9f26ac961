"""CLI for fine-tuning and prediction-file export.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .config import DEFAULT_EPOCHS, DEFAULT_LEARNING_RATE, make_config
from .data import AdapterError
from .finetune import finetune
from .predict import predict_to_file
from .tiny import build_tiny_model


def cmd_finetune(args) -> int:
    config = make_config(
        args.model_name,
        max_seq_len=args.max_seq_len,
        batch_size=args.batch_size,
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=args.seed,
    )
    out = finetune(args.train, config, args.out)
    print(f"saved fine-tuned model to {out}", file=sys.stderr)
    return 0


def cmd_predict(args) -> int:
    predict_to_file(args.model, args.in_path, args.out, batch_size=args.batch_size)
    print(f"wrote predictions to {args.out}", file=sys.stderr)
    return 0


def cmd_make_tiny(args) -> int:
    out = build_tiny_model(
        args.vocab_from,
        args.out,
        vocab_size=args.vocab_size,
        hidden_size=args.hidden,
        num_layers=args.layers,
        seed=args.seed,
    )
    print(f"wrote tiny model to {out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="argrel-adapter",
        description="Fine-tune transformer pair classifiers on argrel TSVs.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="<command>")

    p = sub.add_parser("finetune", help="fine-tune a pretrained model on a task TSV")
    p.add_argument("--train", required=True)
    p.add_argument("--model-name", required=True, help="HF model name or local model directory")
    p.add_argument("--out", required=True)
    p.add_argument("--max-seq-len", type=int, default=None, help="default: per-model table")
    p.add_argument("--batch-size", type=int, default=None, help="default: per-model table")
    p.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)
    p.add_argument("--lr", type=float, default=DEFAULT_LEARNING_RATE)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("predict", help="write a prediction file for a task TSV")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--batch-size", type=int, default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("make-tiny", help="build a tiny random-init model for smoke runs")
    p.add_argument("--vocab-from", required=True, help="task TSV supplying the vocabulary")
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-size", type=int, default=2000)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_tiny)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (AdapterError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
