"""Command-line pipeline: fetch -> compile -> split -> train/predict -> score.

Exit codes: 0 success, 1 data error, 2 usage error.  Diagnostics go to
stderr; tables and reports go to stdout; datasets, models and predictions
go to files (written atomically).  All randomness flows from explicit
--seed flags.  Mutating subcommands drop a ``*.manifest.json`` next to
their output recording the full configuration, input digests, tool version
and timestamp.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .baseline import TrainConfig, load_model, predict_dataset, save_model, train
from .corpus_client import CorpusRef, MANIFEST_NAME, fetch_corpus, load_cached, load_local
from .dataset import (
    CollapseScheme,
    SplitSpec,
    class_distribution,
    collapse_labels,
    read_tsv,
    split_paths,
    stratified_split,
    write_tsv,
)
from .errors import ArgrelError
from .evaluation import (
    confusion,
    cross_domain_report,
    error_distribution,
    read_prediction_file,
    score_prediction_file,
    write_prediction_file,
)
from .pair_compiler import Casing, CompileConfig, NegativeScope, compile_corpus
from .util import atomic_write_text

CACHE_ENV = "ARGREL_CACHE_DIR"
DEFAULT_BASE_URL = "http://corpora.aifdb.org"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_run_manifest(anchor: Path, subcommand: str, config: dict, inputs: list[Path]) -> None:
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "inputs": {str(p): _sha256_file(p) for p in inputs if p.exists()},
        "tool_version": __version__,
        "timestamp": _utc_now(),
    }
    atomic_write_text(
        Path(str(anchor) + ".manifest.json"), json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    )


def _cache_dir(args) -> Path:
    if args.cache:
        return Path(args.cache)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    raise ArgrelError(f"no cache directory: pass --cache or set {CACHE_ENV}")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r} ({exc})")


def _seed(text: str) -> int:
    value = int(text)
    if not (0 <= value < (1 << 64)):
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def cmd_fetch(args) -> int:
    cache = _cache_dir(args)
    ref = CorpusRef(corpus_id=args.corpus, base_url=args.base_url.rstrip("/") + "/" + args.corpus)
    snapshot = fetch_corpus(ref, cache, delay_seconds=args.delay)
    print(f"{snapshot.corpus_id}: {len(snapshot.maps)} maps, digest {snapshot.content_digest}", file=sys.stderr)
    _write_run_manifest(
        cache / args.corpus / "fetch",
        "fetch",
        {"corpus": args.corpus, "base_url": ref.base_url, "digest": snapshot.content_digest},
        [],
    )
    return 0


def cmd_compile(args) -> int:
    cache = _cache_dir(args)
    corpus_dir = cache / args.corpus
    if not corpus_dir.is_dir():
        raise ArgrelError(f"no corpus at {corpus_dir}; run `argrel fetch` or point --cache at map JSONs")
    if (corpus_dir / MANIFEST_NAME).exists():
        snapshot = load_cached(cache, args.corpus)
    else:
        snapshot = load_local(corpus_dir, args.corpus)
    config = CompileConfig(
        seed=args.seed,
        casing=Casing(args.casing),
        no_ratio=args.no_ratio,
        negative_scope=NegativeScope(args.scope),
    )
    ds = compile_corpus(snapshot, config)
    write_tsv(ds, args.out)
    report = ds.provenance.report
    skipped = len(report.maps_skipped)
    print(
        f"compiled {len(ds.pairs)} pairs from {report.maps_processed} maps"
        + (f" ({skipped} skipped)" if skipped else ""),
        file=sys.stderr,
    )
    _write_run_manifest(
        Path(args.out),
        "compile",
        {
            "corpus": args.corpus,
            "snapshot_digest": snapshot.content_digest,
            **config.to_dict(),
            "out": str(args.out),
        },
        [],
    )
    return 0


def cmd_split(args) -> int:
    ds = read_tsv(args.in_path)
    spec = SplitSpec(train_fraction=args.train_frac, seed=args.seed, stratified=not args.no_stratify)
    train_ds, test_ds = stratified_split(ds, spec)
    train_path, test_path = split_paths(args.in_path)
    write_tsv(train_ds, train_path)
    write_tsv(test_ds, test_path)
    print(f"train {len(train_ds.pairs)} -> {train_path}", file=sys.stderr)
    print(f"test  {len(test_ds.pairs)} -> {test_path}", file=sys.stderr)
    _write_run_manifest(
        train_path,
        "split",
        {
            "in": str(args.in_path),
            "train_fraction": str(spec.train_fraction),
            "seed": spec.seed,
            "stratified": spec.stratified,
        },
        [Path(args.in_path)],
    )
    return 0


def cmd_stats(args) -> int:
    ds = read_tsv(args.in_path)
    print(class_distribution(ds).render())
    return 0


def cmd_collapse(args) -> int:
    ds = read_tsv(args.in_path)
    out = collapse_labels(ds, CollapseScheme(args.scheme))
    write_tsv(out, args.out)
    print(f"kept {len(out.pairs)} binary pairs -> {args.out}", file=sys.stderr)
    _write_run_manifest(
        Path(args.out),
        "collapse",
        {"in": str(args.in_path), "scheme": args.scheme, "out": str(args.out)},
        [Path(args.in_path)],
    )
    return 0


def cmd_train_baseline(args) -> int:
    ds = read_tsv(args.train)
    config = TrainConfig(
        learning_rate=args.lr,
        l2=args.l2,
        epochs=args.epochs,
        batch_size=args.batch_size,
        dim=args.dim,
        seed=args.seed,
    )
    model = train(ds, config)
    save_model(model, args.model)
    print(f"trained on {len(ds.pairs)} pairs, final loss {model.final_loss:.6f}", file=sys.stderr)
    _write_run_manifest(
        Path(args.model),
        "train-baseline",
        {"train": str(args.train), **config.to_dict(), "model": str(args.model)},
        [Path(args.train)],
    )
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    ds = read_tsv(args.in_path, label_set=model.label_set)
    labels, probs = predict_dataset(model, ds)
    write_prediction_file(args.out, labels, probs)
    print(f"predicted {len(labels)} pairs -> {args.out}", file=sys.stderr)
    _write_run_manifest(
        Path(args.out),
        "predict",
        {"model": str(args.model), "in": str(args.in_path), "out": str(args.out)},
        [Path(args.model), Path(args.in_path)],
    )
    return 0


def cmd_score(args) -> int:
    report = score_prediction_file(args.gold, args.pred)
    print(report.records() if args.format == "records" else report.render())
    return 0


def cmd_error_report(args) -> int:
    gold_ds = read_tsv(args.gold)
    preds, _ = read_prediction_file(args.pred, gold_ds.label_set)
    cm = confusion([p.label for p in gold_ds.pairs], preds, gold_ds.label_set)
    print(error_distribution(cm).render())
    return 0


def cmd_cross_domain(args) -> int:
    gold_dir = Path(args.gold_dir)
    pred_dir = Path(args.pred_dir)
    scored = {}
    for gold_path in sorted(gold_dir.glob("*.tsv")):
        if gold_path.name.endswith((".train.tsv", ".pred.tsv")):
            continue
        name = gold_path.name[: -len(".tsv")]
        pred_path = pred_dir / f"{name}.pred.tsv"
        if not pred_path.exists():
            raise ArgrelError(f"no prediction file for corpus {name!r}: expected {pred_path}")
        scored[name] = score_prediction_file(gold_path, pred_path)
    if not scored:
        raise ArgrelError(f"no gold TSVs found in {gold_dir}")
    table = cross_domain_report(scored)
    print(table.records() if args.format == "records" else table.render())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="argrel",
        description="Compile AIF argument corpora into relation datasets and score classifiers.",
    )
    parser.add_argument("--version", action="version", version=f"argrel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="<command>")

    p = sub.add_parser("fetch", help="download a corpus into the cache")
    p.add_argument("--corpus", required=True)
    p.add_argument("--cache", default=None, help=f"cache root (default: ${CACHE_ENV})")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL)
    p.add_argument("--delay", type=float, default=0.5, help="seconds between requests")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("compile", help="compile cached maps into a pair dataset TSV")
    p.add_argument("--cache", default=None, help=f"cache root (default: ${CACHE_ENV})")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=_seed, default=42)
    p.add_argument("--casing", choices=[c.value for c in Casing], default=Casing.UNCASED.value)
    p.add_argument("--no-ratio", type=_fraction, default=Fraction(65, 100), help="NO share, e.g. 65/100")
    p.add_argument("--scope", choices=[s.value for s in NegativeScope], default=NegativeScope.WITHIN_MAP.value)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("split", help="stratified train/test split of a dataset TSV")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--train-frac", type=_fraction, default=Fraction(8, 10))
    p.add_argument("--seed", type=_seed, default=42)
    p.add_argument("--no-stratify", action="store_true")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", help="class distribution of a dataset TSV")
    p.add_argument("--in", dest="in_path", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("collapse", help="collapse to the binary attack/support task")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--scheme", choices=[s.value for s in CollapseScheme], default="binary")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("train-baseline", help="train the linear baseline classifier")
    p.add_argument("--train", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--lr", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--l2", type=float, default=TrainConfig.l2)
    p.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument("--dim", type=int, default=TrainConfig.dim)
    p.add_argument("--seed", type=_seed, default=TrainConfig.seed)
    p.set_defaults(func=cmd_train_baseline)

    p = sub.add_parser("predict", help="write a prediction file for a dataset TSV")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("score", help="score a prediction file against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--format", choices=["table", "records"], default="table")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("error-report", help="misclassification distribution per gold class")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.set_defaults(func=cmd_error_report)

    p = sub.add_parser("cross-domain", help="macro-F1 table over several corpora")
    p.add_argument("--gold-dir", required=True)
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--format", choices=["table", "records"], default="table")
    p.set_defaults(func=cmd_cross_domain)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ArgrelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
