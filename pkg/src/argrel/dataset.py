"""Pair-dataset container: TSV persistence, splitting, collapsing, stats.

The on-disk format is three tab-separated columns per line
(``proposition1<TAB>proposition2<TAB>label``), no header, UTF-8, LF.
A sidecar ``<path>.meta.json`` carries the label set and compile
provenance; datasets read without one get an unknown provenance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path

from .errors import EmptyClass, FormatError
from .pair_compiler import (
    CompileConfig,
    CompileReport,
    LabeledPair,
    RelationLabel,
    STANDARD_LABELS,
)
from .util import atomic_write_bytes, atomic_write_text, hash_stream, shuffled

SUPPORT = "Support"
ATTACK = "Attack"
BINARY_LABELS: tuple[str, ...] = (SUPPORT, ATTACK)

_META_SUFFIX = ".meta.json"
_META_FORMAT = "argrel-dataset-meta"


class CollapseScheme(Enum):
    BINARY_ATTACK_SUPPORT = "binary"


@dataclass(frozen=True)
class Provenance:
    corpus_id: str = "unknown"
    content_digest: str = ""
    compile_config: CompileConfig | None = None
    report: CompileReport | None = None

    def to_dict(self) -> dict:
        return {
            "corpus_id": self.corpus_id,
            "content_digest": self.content_digest,
            "compile_config": self.compile_config.to_dict() if self.compile_config else None,
            "report": self.report.to_dict() if self.report else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        report = None
        if d.get("report"):
            r = d["report"]
            report = CompileReport(
                maps_processed=int(r["maps_processed"]),
                maps_skipped=tuple((str(a), str(b)) for a, b in r["maps_skipped"]),
                class_counts={str(k): int(v) for k, v in r["class_counts"].items()},
            )
        return cls(
            corpus_id=str(d.get("corpus_id", "unknown")),
            content_digest=str(d.get("content_digest", "")),
            compile_config=CompileConfig.from_dict(d["compile_config"]) if d.get("compile_config") else None,
            report=report,
        )


@dataclass(frozen=True)
class PairDataset:
    pairs: tuple[LabeledPair, ...]
    label_set: tuple[str, ...] = STANDARD_LABELS
    provenance: Provenance | None = field(default=None, compare=False)

    def __post_init__(self):
        allowed = set(self.label_set)
        for p in self.pairs:
            if p.label not in allowed:
                raise ValueError(f"pair label {p.label!r} outside label set {self.label_set}")

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: Fraction = Fraction(8, 10)
    seed: int = 42
    stratified: bool = True

    def __post_init__(self):
        if not (0 < self.train_fraction < 1):
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class ClassCounts:
    """Per-label counts and exact fractions, in label-set order, plus total."""

    rows: tuple[tuple[str, int, Fraction], ...]
    total: int

    def count(self, label: str) -> int:
        for name, n, _ in self.rows:
            if name == label:
                return n
        raise KeyError(label)

    def render(self) -> str:
        width = max([5] + [len(name) for name, _, _ in self.rows])
        lines = [f"{'label':<{width}}  {'count':>7}  fraction"]
        for name, n, frac in self.rows:
            lines.append(f"{name:<{width}}  {n:>7}  {float(frac):.4f}")
        lines.append(f"{'total':<{width}}  {self.total:>7}  {1.0 if self.total else 0.0:.4f}")
        return "\n".join(lines)


def write_tsv(ds: PairDataset, path: str | Path) -> None:
    """Write the three-column TSV plus its metadata sidecar, atomically."""
    path = Path(path)
    lines = []
    for i, p in enumerate(ds.pairs, start=1):
        for text in (p.proposition1, p.proposition2):
            if "\t" in text or "\n" in text or "\r" in text:
                raise FormatError(str(path), i, "proposition text contains a tab or newline")
        lines.append(f"{p.proposition1}\t{p.proposition2}\t{p.label}\n")
    atomic_write_bytes(path, "".join(lines).encode("utf-8"))
    meta = {
        "format": _META_FORMAT,
        "version": 1,
        "label_set": list(ds.label_set),
        "provenance": ds.provenance.to_dict() if ds.provenance else None,
    }
    atomic_write_text(Path(str(path) + _META_SUFFIX), json.dumps(meta, sort_keys=True, indent=2) + "\n")


def read_tsv(path: str | Path, label_set: tuple[str, ...] | None = None) -> PairDataset:
    """Read a task TSV; errors carry the 1-based offending line number.

    The label set comes from (in order of precedence) the `label_set`
    argument, the sidecar, or the standard four-class set.
    """
    path = Path(path)
    provenance: Provenance | None = None
    sidecar_labels: tuple[str, ...] | None = None
    meta_path = Path(str(path) + _META_SUFFIX)
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        if meta.get("format") == _META_FORMAT:
            sidecar_labels = tuple(str(x) for x in meta.get("label_set", ()))
            if meta.get("provenance"):
                provenance = Provenance.from_dict(meta["provenance"])
    labels = label_set or sidecar_labels or STANDARD_LABELS
    allowed = set(labels)

    pairs: list[LabeledPair] = []
    text = path.read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        cols = line.split("\t")
        if len(cols) != 3:
            raise FormatError(str(path), lineno, f"expected 3 tab-separated columns, got {len(cols)}")
        p1, p2, label = cols
        if not p1 or not p2 or not label:
            raise FormatError(str(path), lineno, "empty field")
        if label not in allowed:
            raise FormatError(str(path), lineno, f"unknown label {label!r}")
        pairs.append(LabeledPair(p1, p2, label))
    return PairDataset(pairs=tuple(pairs), label_set=tuple(labels), provenance=provenance)


def stratified_split(ds: PairDataset, spec: SplitSpec) -> tuple[PairDataset, PairDataset]:
    """Split into train/test; per class, train gets floor(fraction * n_c) pairs.

    Membership is chosen by a seeded shuffle within each class; both halves
    keep the original dataset order.  Raises EmptyClass when a label in the
    label set has no pairs.
    """
    frac = spec.train_fraction
    stream = hash_stream(spec.seed)
    train_idx: set[int] = set()
    if spec.stratified:
        for label in ds.label_set:
            idxs = [i for i, p in enumerate(ds.pairs) if p.label == label]
            if not idxs:
                raise EmptyClass(f"class {label!r} has no pairs")
            order = shuffled(idxs, stream)
            n_train = (frac.numerator * len(idxs)) // frac.denominator
            train_idx.update(order[:n_train])
    else:
        if not ds.pairs:
            raise EmptyClass("dataset is empty")
        order = shuffled(range(len(ds.pairs)), stream)
        n_train = (frac.numerator * len(ds.pairs)) // frac.denominator
        train_idx.update(order[:n_train])

    train = tuple(p for i, p in enumerate(ds.pairs) if i in train_idx)
    test = tuple(p for i, p in enumerate(ds.pairs) if i not in train_idx)
    return (
        PairDataset(pairs=train, label_set=ds.label_set, provenance=ds.provenance),
        PairDataset(pairs=test, label_set=ds.label_set, provenance=ds.provenance),
    )


def collapse_labels(ds: PairDataset, scheme: CollapseScheme = CollapseScheme.BINARY_ATTACK_SUPPORT) -> PairDataset:
    """Collapse to the binary attack/support task: RA -> Support, CA -> Attack.

    MA and NO pairs are dropped; order is preserved.
    """
    if scheme is not CollapseScheme.BINARY_ATTACK_SUPPORT:
        raise ValueError(f"unknown collapse scheme {scheme!r}")
    if tuple(ds.label_set) != STANDARD_LABELS:
        raise ValueError("collapse_labels expects the four-class label set")
    mapping = {RelationLabel.RA.value: SUPPORT, RelationLabel.CA.value: ATTACK}
    pairs = tuple(
        LabeledPair(p.proposition1, p.proposition2, mapping[p.label], map_id=p.map_id, corpus_id=p.corpus_id)
        for p in ds.pairs
        if p.label in mapping
    )
    return PairDataset(pairs=pairs, label_set=BINARY_LABELS, provenance=ds.provenance)


def class_distribution(ds: PairDataset) -> ClassCounts:
    """Counts and exact fractional shares per label, in label-set order."""
    counts = {label: 0 for label in ds.label_set}
    for p in ds.pairs:
        counts[p.label] += 1
    total = len(ds.pairs)
    rows = tuple(
        (label, counts[label], Fraction(counts[label], total) if total else Fraction(0))
        for label in ds.label_set
    )
    return ClassCounts(rows=rows, total=total)


def split_paths(tsv_path: str | Path) -> tuple[Path, Path]:
    """Conventional output names: <stem>.train.tsv / <stem>.test.tsv."""
    p = Path(tsv_path)
    stem = p.name[: -len(".tsv")] if p.name.endswith(".tsv") else p.name
    return p.with_name(stem + ".train.tsv"), p.with_name(stem + ".test.tsv")
