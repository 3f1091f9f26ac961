"""Emit prediction files from a fine-tuned artifact."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from . import LABELS
from .data import read_pairs_tsv, write_prediction_file
from .finetune import CONFIG_ECHO, _device


def predict_to_file(
    artifact_dir: str | Path,
    in_tsv: str | Path,
    out_path: str | Path,
    batch_size: int | None = None,
    max_seq_len: int | None = None,
) -> None:
    """Score every row of the input TSV; output is line-aligned with it.

    Each output line is the argmax label (ties break toward the earlier
    class in RA/CA/MA/NO order) followed by the four softmax probabilities.
    """
    artifact_dir = Path(artifact_dir)
    echo = {}
    echo_path = artifact_dir / CONFIG_ECHO
    if echo_path.exists():
        echo = json.loads(echo_path.read_text(encoding="utf-8"))
    seq_len = max_seq_len or int(echo.get("max_seq_len", 256))
    bs = batch_size or int(echo.get("batch_size", 32))

    rows = read_pairs_tsv(in_tsv)
    tokenizer = AutoTokenizer.from_pretrained(artifact_dir)
    model = AutoModelForSequenceClassification.from_pretrained(artifact_dir)
    device = _device()
    model.to(device)
    model.eval()

    labels: list[str] = []
    probs: list[tuple[float, ...]] = []
    with torch.no_grad():
        for start in range(0, len(rows), bs):
            chunk = rows[start : start + bs]
            enc = tokenizer(
                [r[0] for r in chunk],
                [r[1] for r in chunk],
                truncation=True,
                max_length=seq_len,
                padding=True,
                return_tensors="pt",
            ).to(device)
            logits = model(**enc).logits.double().cpu().numpy()
            dist = np.exp(logits - logits.max(axis=1, keepdims=True))
            dist /= dist.sum(axis=1, keepdims=True)
            for row in dist:
                labels.append(LABELS[int(np.argmax(row))])
                probs.append(tuple(float(v) for v in row))
    write_prediction_file(out_path, labels, probs)
