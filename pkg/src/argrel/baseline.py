"""Self-contained linear classifier over hashed text-pair features.

Multinomial logistic regression trained by seeded mini-batch gradient
descent; the feature map hashes unigrams and bigrams of each proposition
and of their concatenation into a fixed-size space and appends three dense
pair-overlap features.  Everything is deterministic given the seed, and the
predicted label is the argmax of the class distribution with ties broken
by label-set order.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .dataset import PairDataset
from .errors import DegenerateData, FormatError
from .util import atomic_write_bytes, hash_stream, shuffled

DEFAULT_DIM = 1 << 18
N_DENSE = 3  # token-overlap Jaccard, length-difference ratio, shared-token count (log-scaled)

_MODEL_FORMAT = "argrel-linear-model"
_MODEL_VERSION = 1


@dataclass(frozen=True)
class FeatureVector:
    indices: tuple[int, ...]
    values: tuple[float, ...]
    dim: int  # hashed dimension + N_DENSE


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    l2: float = 1e-4
    epochs: int = 30
    batch_size: int = 64
    dim: int = DEFAULT_DIM
    seed: int = 42

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "dim": self.dim,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(
            learning_rate=float(d["learning_rate"]),
            l2=float(d["l2"]),
            epochs=int(d["epochs"]),
            batch_size=int(d["batch_size"]),
            dim=int(d["dim"]),
            seed=int(d["seed"]),
        )


@dataclass(frozen=True)
class ClassDistribution:
    label_set: tuple[str, ...]
    probs: tuple[float, ...]


@dataclass
class LinearModel:
    label_set: tuple[str, ...]
    dim: int
    weights: np.ndarray  # (n_classes, dim + N_DENSE)
    bias: np.ndarray  # (n_classes,)
    config: TrainConfig
    final_loss: float


def _hash_index(namespace: str, gram: str, dim: int) -> int:
    return zlib.crc32(f"{namespace}|{gram}".encode("utf-8")) % dim


def featurize_pair(p1: str, p2: str, dim: int = DEFAULT_DIM) -> FeatureVector:
    """Hashed n-gram counts (namespaces A, B, AB), unit-L2, plus dense overlap.

    Deterministic: the hash is CRC-32 of the namespaced gram, so the same
    inputs always produce the same vector on any platform.
    """
    toks1 = p1.split()
    toks2 = p2.split()
    counts: dict[int, float] = {}

    def add(namespace: str, tokens: list[str]):
        for t in tokens:
            idx = _hash_index(namespace, t, dim)
            counts[idx] = counts.get(idx, 0.0) + 1.0
        for a, b in zip(tokens, tokens[1:]):
            idx = _hash_index(namespace, f"{a} {b}", dim)
            counts[idx] = counts.get(idx, 0.0) + 1.0

    add("A", toks1)
    add("B", toks2)
    add("AB", toks1 + toks2)

    norm = math.sqrt(sum(v * v for v in counts.values()))
    if norm:
        counts = {i: v / norm for i, v in counts.items()}

    set1, set2 = set(toks1), set(toks2)
    union = set1 | set2
    shared = len(set1 & set2)
    jaccard = shared / len(union) if union else 0.0
    len_ratio = abs(len(toks1) - len(toks2)) / max(len(toks1), len(toks2), 1)
    dense = {dim: jaccard, dim + 1: len_ratio, dim + 2: math.log1p(shared)}

    merged = dict(sorted(counts.items()) + sorted(dense.items()))
    return FeatureVector(indices=tuple(merged), values=tuple(merged.values()), dim=dim + N_DENSE)


def _feature_matrix(pairs: Sequence, dim: int) -> sparse.csr_matrix:
    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for p in pairs:
        fv = featurize_pair(p.proposition1, p.proposition2, dim)
        indices.extend(fv.indices)
        data.extend(fv.values)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(pairs), dim + N_DENSE),
    )


def loss_and_grad(
    weights: np.ndarray, bias: np.ndarray, X, y_idx: np.ndarray, l2: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy with L2 penalty, and its analytic gradient."""
    n = X.shape[0]
    scores = np.asarray(X @ weights.T) + bias
    scores -= scores.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(scores).sum(axis=1, keepdims=True))
    log_p = scores - log_z
    loss = -log_p[np.arange(n), y_idx].mean() + 0.5 * l2 * float((weights**2).sum())
    g = np.exp(log_p)
    g[np.arange(n), y_idx] -= 1.0
    g /= n
    grad_w = np.asarray((X.T @ g).T) + l2 * weights
    grad_b = g.sum(axis=0)
    return float(loss), grad_w, grad_b


def train(train_set: PairDataset, config: TrainConfig = TrainConfig()) -> LinearModel:
    """Fit the classifier with seeded mini-batch gradient descent."""
    if not train_set.pairs:
        raise DegenerateData("training set is empty")
    label_set = tuple(train_set.label_set)
    index = {label: i for i, label in enumerate(label_set)}
    y = np.asarray([index[p.label] for p in train_set.pairs], dtype=np.int64)
    if len(set(y.tolist())) < 2:
        raise DegenerateData("training set covers fewer than 2 classes")

    X = _feature_matrix(train_set.pairs, config.dim)
    n, d = X.shape
    k = len(label_set)
    weights = np.zeros((k, d))
    bias = np.zeros(k)
    stream = hash_stream(config.seed)

    for _ in range(config.epochs):
        order = shuffled(range(n), stream)
        for start in range(0, n, config.batch_size):
            rows = order[start : start + config.batch_size]
            _, grad_w, grad_b = loss_and_grad(weights, bias, X[rows], y[rows], config.l2)
            weights -= config.learning_rate * grad_w
            bias -= config.learning_rate * grad_b

    final_loss, _, _ = loss_and_grad(weights, bias, X, y, config.l2)
    return LinearModel(
        label_set=label_set,
        dim=config.dim,
        weights=weights,
        bias=bias,
        config=config,
        final_loss=final_loss,
    )


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    scores = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(scores)
    return e / e.sum(axis=1, keepdims=True)


def predict(model: LinearModel, pair: tuple[str, str]) -> tuple[str, ClassDistribution]:
    """Class distribution and argmax label for one normalized text pair."""
    fv = featurize_pair(pair[0], pair[1], model.dim)
    scores = np.zeros((1, len(model.label_set)))
    if fv.indices:
        idx = np.asarray(fv.indices)
        vals = np.asarray(fv.values)
        scores[0] = model.weights[:, idx] @ vals
    scores[0] += model.bias
    probs = _softmax_rows(scores)[0]
    label = model.label_set[int(np.argmax(probs))]
    return label, ClassDistribution(label_set=model.label_set, probs=tuple(float(v) for v in probs))


def predict_dataset(model: LinearModel, ds: PairDataset) -> tuple[list[str], np.ndarray]:
    """Vectorized prediction over a dataset; returns labels and (n, k) probabilities."""
    X = _feature_matrix(ds.pairs, model.dim)
    scores = np.asarray(X @ model.weights.T) + model.bias
    probs = _softmax_rows(scores)
    labels = [model.label_set[i] for i in np.argmax(probs, axis=1)]
    return labels, probs


def save_model(model: LinearModel, path: str | Path) -> None:
    """Persist as a one-line JSON header followed by raw float64 weights."""
    header = {
        "format": _MODEL_FORMAT,
        "version": _MODEL_VERSION,
        "label_set": list(model.label_set),
        "dim": model.dim,
        "n_dense": N_DENSE,
        "dtype": "<f8",
        "shape": list(model.weights.shape),
        "hyperparams": model.config.to_dict(),
        "final_loss": model.final_loss,
    }
    w = np.ascontiguousarray(model.weights, dtype="<f8")
    b = np.ascontiguousarray(model.bias, dtype="<f8")
    blob = json.dumps(header, sort_keys=True).encode("utf-8") + b"\n" + w.tobytes() + b.tobytes()
    atomic_write_bytes(path, blob)


def load_model(path: str | Path) -> LinearModel:
    path = Path(path)
    raw = path.read_bytes()
    nl = raw.find(b"\n")
    if nl < 0:
        raise FormatError(str(path), 1, "missing model header")
    try:
        header = json.loads(raw[:nl].decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(str(path), 1, f"bad model header: {exc}") from exc
    if header.get("format") != _MODEL_FORMAT or header.get("version") != _MODEL_VERSION:
        raise FormatError(str(path), 1, "not a supported model artifact")
    k, d = (int(v) for v in header["shape"])
    body = raw[nl + 1 :]
    expected = (k * d + k) * 8
    if len(body) != expected:
        raise FormatError(str(path), 1, f"model payload is {len(body)} bytes, expected {expected}")
    weights = np.frombuffer(body[: k * d * 8], dtype="<f8").reshape(k, d).copy()
    bias = np.frombuffer(body[k * d * 8 :], dtype="<f8").copy()
    return LinearModel(
        label_set=tuple(str(x) for x in header["label_set"]),
        dim=int(header["dim"]),
        weights=weights,
        bias=bias,
        config=TrainConfig.from_dict(header["hyperparams"]),
        final_loss=float(header["final_loss"]),
    )
