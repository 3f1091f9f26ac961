"""Transformer fine-tuning adapter for the argrel pipeline.

Couples to the core toolkit only through its file formats: reads the
three-column task TSV, writes the label + four-probability prediction
format that the `argrel score` harness consumes.
"""

__version__ = "0.1.0"

LABELS = ("RA", "CA", "MA", "NO")
