"""Toolkit for turning AIF argument maps into sentence-pair relation datasets
and scoring relation classifiers (RA/CA/MA/NO)."""

__version__ = "0.1.0"
