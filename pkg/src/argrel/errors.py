"""Exception types shared across the toolkit.

Data problems raise subclasses of :class:`ArgrelError` so callers can catch
one base class at pipeline boundaries (the CLI maps them to exit code 1).
"""

from __future__ import annotations


class ArgrelError(Exception):
    """Base class for all data and usage errors raised by this package."""


class MalformedJson(ArgrelError):
    """A document is not well-formed JSON."""

    def __init__(self, map_id: str, detail: str):
        super().__init__(f"map '{map_id}': malformed JSON: {detail}")
        self.map_id = map_id
        self.detail = detail


class SchemaViolation(ArgrelError):
    """A well-formed JSON document breaks the argument-map schema."""

    def __init__(self, map_id: str, location: str, detail: str):
        super().__init__(f"map '{map_id}' at {location}: {detail}")
        self.map_id = map_id
        self.location = location
        self.detail = detail


class NetworkError(ArgrelError):
    """An HTTP fetch failed; carries the status code when one was received."""

    def __init__(self, url: str, status: int | None, detail: str, retryable: bool = True):
        super().__init__(f"GET {url} failed ({status if status is not None else 'no response'}): {detail}")
        self.url = url
        self.status = status
        self.retryable = retryable


class CacheCorrupt(ArgrelError):
    """A cached document no longer matches the digest recorded in the manifest."""

    def __init__(self, path: str, expected: str, actual: str):
        super().__init__(f"cache entry {path}: digest mismatch (manifest {expected}, file {actual})")
        self.path = path
        self.expected = expected
        self.actual = actual


class InsufficientPool(ArgrelError):
    """Not enough distinct candidate pairs to satisfy a negative-sample request."""

    def __init__(self, available: int, requested: int):
        super().__init__(f"negative pool exhausted: {available} candidate pairs available, {requested} requested")
        self.available = available
        self.requested = requested


class EmptyCorpus(ArgrelError):
    """A corpus compiled to zero related pairs."""


class FormatError(ArgrelError):
    """A TSV or prediction file breaks its format contract."""

    def __init__(self, path: str, line: int, detail: str):
        super().__init__(f"{path}:{line}: {detail}")
        self.path = path
        self.line = line
        self.detail = detail


class EmptyClass(ArgrelError):
    """A stratified split was asked for on a dataset with an empty class."""


class DegenerateData(ArgrelError):
    """Training data does not cover at least two classes."""


class LengthMismatch(ArgrelError):
    """Gold and prediction sequences differ in length."""

    def __init__(self, n_gold: int, n_pred: int):
        super().__init__(f"length mismatch: {n_gold} gold labels vs {n_pred} predictions")
        self.n_gold = n_gold
        self.n_pred = n_pred


class UnknownLabel(ArgrelError):
    """A label outside the active label set was encountered."""

    def __init__(self, label: str, label_set: tuple[str, ...]):
        super().__init__(f"unknown label {label!r}; expected one of {list(label_set)}")
        self.label = label
        self.label_set = label_set


class ProbabilityError(ArgrelError):
    """A prediction row carries probabilities that do not form a distribution."""

    def __init__(self, path: str, line: int, detail: str):
        super().__init__(f"{path}:{line}: {detail}")
        self.path = path
        self.line = line
        self.detail = detail
