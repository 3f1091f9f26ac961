"""Fine-tune a pretrained sentence-pair classifier on a task TSV."""

from __future__ import annotations

import json
import random
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from . import LABELS, __version__
from .config import FinetuneConfig
from .data import read_pairs_tsv

CONFIG_ECHO = "finetune_config.json"


def _set_seeds(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed % (2**32))
    torch.manual_seed(seed)


def _device() -> torch.device:
    return torch.device("cuda" if torch.cuda.is_available() else "cpu")


def finetune(train_tsv: str | Path, config: FinetuneConfig, out_dir: str | Path) -> Path:
    """Train for config.epochs and save the artifact with the config embedded.

    The classification head maps logits to the fixed RA/CA/MA/NO order, so
    downstream prediction files line up with the scoring harness columns.
    """
    rows = read_pairs_tsv(train_tsv)
    if not rows:
        raise ValueError(f"empty training file: {train_tsv}")
    _set_seeds(config.seed)

    tokenizer = AutoTokenizer.from_pretrained(config.model_name)
    model = AutoModelForSequenceClassification.from_pretrained(
        config.model_name,
        num_labels=len(LABELS),
        id2label={i: label for i, label in enumerate(LABELS)},
        label2id={label: i for i, label in enumerate(LABELS)},
    )
    device = _device()
    model.to(device)
    model.train()

    label_ids = torch.tensor([LABELS.index(label) for _, _, label in rows])
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    generator = torch.Generator().manual_seed(config.seed)

    n = len(rows)
    last_loss = float("nan")
    for _ in range(config.epochs):
        order = torch.randperm(n, generator=generator).tolist()
        for start in range(0, n, config.batch_size):
            batch_idx = order[start : start + config.batch_size]
            enc = tokenizer(
                [rows[i][0] for i in batch_idx],
                [rows[i][1] for i in batch_idx],
                truncation=True,
                max_length=config.max_seq_len,
                padding=True,
                return_tensors="pt",
            ).to(device)
            out = model(**enc, labels=label_ids[batch_idx].to(device))
            optimizer.zero_grad()
            out.loss.backward()
            optimizer.step()
            last_loss = float(out.loss.detach())

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    echo = {
        "adapter_version": __version__,
        "labels": list(LABELS),
        "final_batch_loss": last_loss,
        "train_rows": n,
        **config.to_dict(),
    }
    (out_dir / CONFIG_ECHO).write_text(json.dumps(echo, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out_dir
