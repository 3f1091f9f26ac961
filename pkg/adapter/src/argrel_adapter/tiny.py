"""Build a tiny randomly-initialized BERT for desk-scale smoke runs.

Real pretrained checkpoints need network access and hours of GPU time;
this constructs a word-level WordPiece vocab from a task TSV plus a
two-layer configuration small enough to fine-tune on a laptop CPU in
seconds.  Useful for pipeline conformance tests, not for accuracy claims.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import torch
from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast

from . import LABELS
from .data import read_pairs_tsv

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


def build_tiny_model(
    vocab_tsv: str | Path,
    out_dir: str | Path,
    vocab_size: int = 2000,
    hidden_size: int = 64,
    num_layers: int = 2,
    num_heads: int = 2,
    max_positions: int = 192,
    seed: int = 0,
) -> Path:
    """Write a loadable tiny model + tokenizer directory; returns its path."""
    counts: Counter[str] = Counter()
    for p1, p2, _ in read_pairs_tsv(vocab_tsv):
        counts.update(p1.lower().split())
        counts.update(p2.lower().split())
    words = [w for w, _ in counts.most_common(max(0, vocab_size - len(SPECIALS)))]

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    vocab_path = out_dir / "vocab.txt"
    vocab_path.write_text("\n".join(SPECIALS + sorted(words)) + "\n", encoding="utf-8")
    tokenizer = BertTokenizerFast(vocab_file=str(vocab_path), do_lower_case=True)

    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=len(SPECIALS) + len(words),
        hidden_size=hidden_size,
        num_hidden_layers=num_layers,
        num_attention_heads=num_heads,
        intermediate_size=hidden_size * 4,
        max_position_embeddings=max_positions,
        num_labels=len(LABELS),
        id2label={i: label for i, label in enumerate(LABELS)},
        label2id={label: i for i, label in enumerate(LABELS)},
    )
    model = BertForSequenceClassification(config)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir
