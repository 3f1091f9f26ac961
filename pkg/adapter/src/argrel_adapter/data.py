"""Task TSV reading and the prediction wire format.

These readers/writers are the whole contract with the core toolkit:
three tab-separated columns in, ``label<TAB>p_RA<TAB>p_CA<TAB>p_MA<TAB>p_NO``
out, UTF-8, LF, no headers, line-aligned.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Sequence

from . import LABELS


class AdapterError(Exception):
    pass


class FormatError(AdapterError):
    def __init__(self, path: str, line: int, detail: str):
        super().__init__(f"{path}:{line}: {detail}")
        self.path = path
        self.line = line
        self.detail = detail


def read_pairs_tsv(path: str | Path) -> list[tuple[str, str, str]]:
    """Rows of (proposition1, proposition2, label) from a task TSV."""
    path = Path(path)
    rows: list[tuple[str, str, str]] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        cols = line.split("\t")
        if len(cols) != 3:
            raise FormatError(str(path), lineno, f"expected 3 columns, got {len(cols)}")
        p1, p2, label = cols
        if not p1 or not p2:
            raise FormatError(str(path), lineno, "empty proposition field")
        if label not in LABELS:
            raise FormatError(str(path), lineno, f"unknown label {label!r}")
        rows.append((p1, p2, label))
    return rows


def write_prediction_file(
    path: str | Path, labels: Sequence[str], probs: Sequence[Sequence[float]]
) -> None:
    """Write label + per-class probability rows, atomically."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        label + "\t" + "\t".join(format(p, ".9f") for p in row) + "\n"
        for label, row in zip(labels, probs)
    ]
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write("".join(lines))
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
