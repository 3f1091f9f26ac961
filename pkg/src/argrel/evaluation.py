"""Scoring: confusion matrices, macro-F1, error distributions, reports.

Conventions: confusion rows are the predicted class and columns the gold
class; precision/recall/F1 use the 0/0 -> 0 rule; macro-F1 averages over
the full label set, including classes absent from a slice, so scores stay
comparable across domains with very different distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path
from typing import Sequence

from .dataset import PairDataset, read_tsv
from .errors import FormatError, LengthMismatch, ProbabilityError, UnknownLabel
from .util import atomic_write_bytes

# Fixed column order of the cross-domain report; extra corpora follow, sorted.
CANONICAL_CORPORA: tuple[str, ...] = (
    "US2016-test",
    "MM2012",
    "Bank",
    "Empire",
    "Money",
    "Problem",
    "Welfare",
)


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[p][g] = number of samples predicted p whose gold class is g."""

    label_set: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    def render(self) -> str:
        width = max(len(name) for name in self.label_set) + 2
        corner = "pred \\ gold"
        lines = [f"{corner:<{width + 2}}" + "".join(f"{g:>{width}}" for g in self.label_set)]
        for p, row in zip(self.label_set, self.counts):
            lines.append(f"{p:<{width + 2}}" + "".join(f"{v:>{width}}" for v in row))
        return "\n".join(lines)


@dataclass(frozen=True)
class ClassScores:
    label: str
    precision: float
    recall: float
    f1: float
    gold_count: int


@dataclass(frozen=True)
class EvaluationReport:
    label_set: tuple[str, ...]
    per_class: tuple[ClassScores, ...]
    macro_f1: float
    accuracy: float
    confusion: ConfusionMatrix
    n: int

    def render(self) -> str:
        width = max([5] + [len(s.label) for s in self.per_class])
        lines = [f"{'class':<{width}}  precision  recall    f1        gold"]
        for s in self.per_class:
            lines.append(
                f"{s.label:<{width}}  {s.precision:<9.4f}  {s.recall:<8.4f}  {s.f1:<8.4f}  {s.gold_count}"
            )
        lines.append(f"macro_f1  {self.macro_f1:.4f}")
        lines.append(f"accuracy  {self.accuracy:.4f}")
        lines.append(f"n         {self.n}")
        return "\n".join(lines)

    def records(self) -> str:
        """Line-delimited key=value serialization, full precision."""
        lines = [f"n={self.n}", f"macro_f1={self.macro_f1!r}", f"accuracy={self.accuracy!r}"]
        for s in self.per_class:
            lines.append(f"{s.label}_precision={s.precision!r}")
            lines.append(f"{s.label}_recall={s.recall!r}")
            lines.append(f"{s.label}_f1={s.f1!r}")
            lines.append(f"{s.label}_gold={s.gold_count}")
        for p, row in zip(self.label_set, self.confusion.counts):
            for g, v in zip(self.label_set, row):
                lines.append(f"confusion_{p}_{g}={v}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ErrorDistribution:
    """values[p][g]: share of misclassified gold-g samples assigned to p; diagonal 0."""

    label_set: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def render(self) -> str:
        width = max([6] + [len(name) for name in self.label_set]) + 2
        corner = "pred \\ gold"
        lines = [f"{corner:<{width + 2}}" + "".join(f"{g:>{width}}" for g in self.label_set)]
        for p, row in zip(self.label_set, self.values):
            cells = "".join(f"{'-' if p == g else format(v, '.3f'):>{width}}" for g, v in zip(self.label_set, row))
            lines.append(f"{p:<{width + 2}}" + cells)
        return "\n".join(lines)


def confusion(golds: Sequence[str], preds: Sequence[str], label_set: Sequence[str]) -> ConfusionMatrix:
    """Count (predicted, gold) co-occurrences over aligned label sequences."""
    if len(golds) != len(preds):
        raise LengthMismatch(len(golds), len(preds))
    labels = tuple(label_set)
    index = {label: i for i, label in enumerate(labels)}
    grid = [[0] * len(labels) for _ in labels]
    for g, p in zip(golds, preds):
        if g not in index:
            raise UnknownLabel(g, labels)
        if p not in index:
            raise UnknownLabel(p, labels)
        grid[index[p]][index[g]] += 1
    return ConfusionMatrix(label_set=labels, counts=tuple(tuple(row) for row in grid))


def per_class_scores(cm: ConfusionMatrix) -> tuple[ClassScores, ...]:
    """Precision/recall/F1 per class with the 0/0 -> 0 convention."""
    k = len(cm.label_set)
    out = []
    for i, label in enumerate(cm.label_set):
        tp = cm.counts[i][i]
        pred_total = sum(cm.counts[i][g] for g in range(k))
        gold_total = sum(cm.counts[p][i] for p in range(k))
        precision = tp / pred_total if pred_total else 0.0
        recall = tp / gold_total if gold_total else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        out.append(ClassScores(label, precision, recall, f1, gold_total))
    return tuple(out)


def macro_f1(cm: ConfusionMatrix) -> float:
    """Unweighted mean of per-class F1 over the full label set."""
    scores = per_class_scores(cm)
    return sum(s.f1 for s in scores) / len(scores)


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.n
    if not total:
        return 0.0
    correct = sum(cm.counts[i][i] for i in range(len(cm.label_set)))
    return correct / total


def error_distribution(cm: ConfusionMatrix) -> ErrorDistribution:
    """Column-normalized misclassification shares (diagonal excluded)."""
    k = len(cm.label_set)
    values = [[0.0] * k for _ in range(k)]
    for g in range(k):
        miss = sum(cm.counts[p][g] for p in range(k) if p != g)
        if not miss:
            continue
        for p in range(k):
            if p != g:
                values[p][g] = cm.counts[p][g] / miss
    return ErrorDistribution(label_set=cm.label_set, values=tuple(tuple(row) for row in values))


def evaluate(golds: Sequence[str], preds: Sequence[str], label_set: Sequence[str]) -> EvaluationReport:
    cm = confusion(golds, preds, label_set)
    scores = per_class_scores(cm)
    return EvaluationReport(
        label_set=cm.label_set,
        per_class=scores,
        macro_f1=sum(s.f1 for s in scores) / len(scores),
        accuracy=accuracy(cm),
        confusion=cm,
        n=cm.n,
    )


def read_prediction_file(
    path: str | Path, label_set: Sequence[str]
) -> tuple[list[str], list[tuple[float, ...]] | None]:
    """Parse a prediction file: per line, a label plus optional probabilities.

    Probability columns are all-or-nothing across the file and must match
    the label-set size, each row summing to 1 +/- 1e-6.
    """
    path = Path(path)
    labels = tuple(label_set)
    allowed = set(labels)
    want_cols: int | None = None
    preds: list[str] = []
    probs: list[tuple[float, ...]] = []
    text = path.read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        cols = line.split("\t")
        if len(cols) not in (1, 1 + len(labels)):
            raise FormatError(str(path), lineno, f"expected 1 or {1 + len(labels)} columns, got {len(cols)}")
        if want_cols is None:
            want_cols = len(cols)
        elif len(cols) != want_cols:
            raise FormatError(str(path), lineno, "probability columns must be all-or-nothing")
        label = cols[0]
        if label not in allowed:
            raise FormatError(str(path), lineno, f"unknown label {label!r}")
        preds.append(label)
        if len(cols) > 1:
            try:
                row = tuple(float(c) for c in cols[1:])
            except ValueError as exc:
                raise FormatError(str(path), lineno, f"bad probability value: {exc}") from exc
            if any(not math.isfinite(v) or v < 0.0 for v in row):
                raise ProbabilityError(str(path), lineno, "probabilities must be finite and non-negative")
            if abs(sum(row) - 1.0) > 1e-6:
                raise ProbabilityError(str(path), lineno, f"probabilities sum to {sum(row)!r}, not 1")
            probs.append(row)
    return preds, (probs if want_cols and want_cols > 1 else None)


def write_prediction_file(
    path: str | Path,
    labels: Sequence[str],
    probs: Sequence[Sequence[float]] | None = None,
) -> None:
    """Emit the prediction wire format, line-aligned with its input TSV."""
    lines = []
    for i, label in enumerate(labels):
        if probs is not None:
            lines.append(label + "\t" + "\t".join(format(v, ".9f") for v in probs[i]) + "\n")
        else:
            lines.append(label + "\n")
    atomic_write_bytes(path, "".join(lines).encode("utf-8"))


def score_prediction_file(
    gold: str | Path, pred: str | Path, label_set: Sequence[str] | None = None
) -> EvaluationReport:
    """Score a prediction file line-by-line against a gold task TSV."""
    gold_ds: PairDataset = read_tsv(gold, label_set=tuple(label_set) if label_set else None)
    labels = gold_ds.label_set
    preds, _ = read_prediction_file(pred, labels)
    golds = [p.label for p in gold_ds.pairs]
    if len(golds) != len(preds):
        raise LengthMismatch(len(golds), len(preds))
    return evaluate(golds, preds, labels)


def format_macro(value: float) -> str:
    """Table-style 2-decimal half-up rendering: 0.704999 -> '.70'."""
    q = Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    s = f"{q:.2f}"
    return s[1:] if s.startswith("0.") else s


@dataclass(frozen=True)
class CrossDomainReport:
    columns: tuple[str, ...]
    macro_scores: dict[str, float]

    def render(self, run_label: str = "run") -> str:
        width = max([len(run_label)] + [len(c) for c in self.columns]) + 2
        header = f"{'':<{width}}" + "".join(f"{c:>{width}}" for c in self.columns)
        row = f"{run_label:<{width}}" + "".join(
            f"{format_macro(self.macro_scores[c]):>{width}}" for c in self.columns
        )
        return header + "\n" + row

    def records(self) -> str:
        return "\n".join(f"{c}_macro_f1={self.macro_scores[c]!r}" for c in self.columns)


def cross_domain_report(scored: dict[str, EvaluationReport]) -> CrossDomainReport:
    """Arrange per-corpus reports into the fixed cross-domain column order."""
    if not scored:
        raise ValueError("need at least one scored corpus")
    by_fold = {name.lower(): name for name in scored}
    columns: list[str] = []
    for canon in CANONICAL_CORPORA:
        name = by_fold.get(canon.lower())
        if name is not None:
            columns.append(name)
    extras = sorted(name for name in scored if name not in columns)
    columns.extend(extras)
    return CrossDomainReport(
        columns=tuple(columns),
        macro_scores={name: scored[name].macro_f1 for name in columns},
    )
