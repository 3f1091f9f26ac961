"""Fine-tuning configuration and per-model defaults.

The (max_seq_len, batch_size) defaults follow the published training setup
for each model family on dual 12GB-class GPUs; large models get halved
sizes to fit memory.  Override freely on smaller hardware.
"""

from __future__ import annotations

from dataclasses import dataclass

# ordered: more specific family names first ("distilbert" before "bert-base",
# "albert-*" before "bert-*", since the shorter names are substrings)
MODEL_DEFAULTS: tuple[tuple[str, tuple[int, int]], ...] = (
    ("distilbert", (256, 128)),
    ("roberta-large", (256, 16)),
    ("roberta-base", (256, 32)),
    ("albert-xxlarge", (128, 4)),
    ("albert-base", (256, 64)),
    ("xlnet-large", (256, 8)),
    ("xlnet-base", (256, 32)),
    ("bert-large", (128, 32)),
    ("bert-base", (256, 64)),
)

FALLBACK_DEFAULTS = (256, 32)
DEFAULT_EPOCHS = 50
DEFAULT_LEARNING_RATE = 1e-5


@dataclass(frozen=True)
class FinetuneConfig:
    model_name: str
    max_seq_len: int
    batch_size: int
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 42

    def __post_init__(self):
        if self.max_seq_len <= 0:
            raise ValueError("max_seq_len must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size <= 0 or self.epochs <= 0:
            raise ValueError("batch_size and epochs must be positive")

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "max_seq_len": self.max_seq_len,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
        }


def defaults_for(model_name: str) -> tuple[int, int]:
    """(max_seq_len, batch_size) defaults for a model name or local path."""
    lowered = model_name.lower()
    for key, value in MODEL_DEFAULTS:
        if key in lowered:
            return value
    return FALLBACK_DEFAULTS


def make_config(
    model_name: str,
    max_seq_len: int | None = None,
    batch_size: int | None = None,
    epochs: int = DEFAULT_EPOCHS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    seed: int = 42,
) -> FinetuneConfig:
    default_seq, default_batch = defaults_for(model_name)
    return FinetuneConfig(
        model_name=model_name,
        max_seq_len=max_seq_len if max_seq_len is not None else default_seq,
        batch_size=batch_size if batch_size is not None else default_batch,
        epochs=epochs,
        learning_rate=learning_rate,
        seed=seed,
    )
