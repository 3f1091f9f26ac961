from __future__ import annotations

import numpy as np
import pytest

from argrel.baseline import (
    DEFAULT_DIM,
    N_DENSE,
    TrainConfig,
    featurize_pair,
    load_model,
    loss_and_grad,
    predict,
    predict_dataset,
    save_model,
    train,
)
from argrel.dataset import PairDataset, SplitSpec, stratified_split
from argrel.errors import DegenerateData
from argrel.evaluation import evaluate
from argrel.pair_compiler import LabeledPair, STANDARD_LABELS

TOY_PAIRS = (
    LabeledPair("quarterly costs keep rising", "we must cap spending", "RA"),
    LabeledPair("we must cap spending", "we must never cap spending", "CA"),
    LabeledPair("we must cap spending", "spending caps are what we need", "MA"),
    LabeledPair("thank you for the question", "the broadcast resumes shortly", "NO"),
)
TOY = PairDataset(pairs=TOY_PAIRS * 4, label_set=STANDARD_LABELS)


class TestFeaturize:
    def test_identical_texts_full_jaccard(self):
        fv = featurize_pair("a", "a", dim=64)
        assert dict(zip(fv.indices, fv.values))[64] == 1.0  # Jaccard slot

    def test_disjoint_texts_zero_jaccard(self):
        fv = featurize_pair("a b", "c d", dim=64)
        assert dict(zip(fv.indices, fv.values))[64] == 0.0

    def test_namespace_separation(self):
        assert featurize_pair("x", "y") != featurize_pair("y", "x")

    def test_deterministic(self):
        a = featurize_pair("the same text", "its counterpart")
        b = featurize_pair("the same text", "its counterpart")
        assert a == b

    def test_indices_in_bounds(self):
        fv = featurize_pair("some words here", "and over there", dim=128)
        assert fv.dim == 128 + N_DENSE
        assert all(0 <= i < fv.dim for i in fv.indices)
        assert all(np.isfinite(v) for v in fv.values)

    def test_default_dim(self):
        fv = featurize_pair("a", "b")
        assert fv.dim == DEFAULT_DIM + N_DENSE


class TestGradient:
    def test_analytic_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        n, d, k = 12, 7, 4
        X = rng.normal(size=(n, d))
        y = rng.integers(0, k, size=n)
        weights = rng.normal(scale=0.5, size=(k, d))
        bias = rng.normal(scale=0.5, size=k)
        l2 = 0.01
        _, grad_w, grad_b = loss_and_grad(weights, bias, X, y, l2)

        eps = 1e-6

        def loss_at(w, b):
            return loss_and_grad(w, b, X, y, l2)[0]

        for idx in np.ndindex(weights.shape):
            w_hi, w_lo = weights.copy(), weights.copy()
            w_hi[idx] += eps
            w_lo[idx] -= eps
            numeric = (loss_at(w_hi, bias) - loss_at(w_lo, bias)) / (2 * eps)
            denom = max(abs(numeric), abs(grad_w[idx]), 1e-8)
            assert abs(numeric - grad_w[idx]) / denom < 1e-5
        for j in range(k):
            b_hi, b_lo = bias.copy(), bias.copy()
            b_hi[j] += eps
            b_lo[j] -= eps
            numeric = (loss_at(weights, b_hi) - loss_at(weights, b_lo)) / (2 * eps)
            denom = max(abs(numeric), abs(grad_b[j]), 1e-8)
            assert abs(numeric - grad_b[j]) / denom < 1e-5


class TestTrain:
    def test_separable_toy_set_fits_perfectly(self):
        model = train(TOY, TrainConfig(dim=1 << 12, epochs=60, batch_size=4))
        for pair in TOY.pairs:
            label, _ = predict(model, (pair.proposition1, pair.proposition2))
            assert label == pair.label

    def test_same_seed_identical_weights(self):
        cfg = TrainConfig(dim=1 << 12, epochs=5, seed=9)
        m1 = train(TOY, cfg)
        m2 = train(TOY, cfg)
        assert np.array_equal(m1.weights, m2.weights)
        assert np.array_equal(m1.bias, m2.bias)

    def test_single_class_rejected(self):
        ds = PairDataset(
            pairs=tuple(LabeledPair(f"text {i}", f"other {i}", "RA") for i in range(4)),
            label_set=STANDARD_LABELS,
        )
        with pytest.raises(DegenerateData):
            train(ds, TrainConfig(dim=256, epochs=1))

    def test_empty_rejected(self):
        with pytest.raises(DegenerateData):
            train(PairDataset(pairs=(), label_set=STANDARD_LABELS), TrainConfig(dim=256))

    def test_final_loss_finite_and_reported(self):
        model = train(TOY, TrainConfig(dim=1 << 12, epochs=5))
        assert np.isfinite(model.final_loss)


class TestPredict:
    def test_zero_weight_model_uniform(self):
        model = train(TOY, TrainConfig(dim=1 << 12, epochs=1))
        model.weights[:] = 0.0
        model.bias[:] = 0.0
        label, dist = predict(model, ("anything", "at all"))
        assert label == model.label_set[0]
        assert dist.probs == (0.25, 0.25, 0.25, 0.25)

    def test_distributions_normalized(self):
        model = train(TOY, TrainConfig(dim=1 << 12, epochs=5))
        rng = np.random.default_rng(3)
        words = ["alpha", "beta", "gamma", "delta", "unseen", "tokens"]
        for _ in range(25):
            p1 = " ".join(rng.choice(words, size=3))
            p2 = " ".join(rng.choice(words, size=4))
            _, dist = predict(model, (p1, p2))
            assert abs(sum(dist.probs) - 1.0) <= 1e-9
            assert all(p > 0 for p in dist.probs)

    def test_argmax_invariant_to_constant_score_shift(self):
        model = train(TOY, TrainConfig(dim=1 << 12, epochs=5))
        labels_before, _ = predict_dataset(model, TOY)
        model.bias += 17.5  # same constant on every class score
        labels_after, _ = predict_dataset(model, TOY)
        assert labels_before == labels_after

    def test_predict_dataset_agrees_with_predict(self):
        model = train(TOY, TrainConfig(dim=1 << 12, epochs=5))
        labels, probs = predict_dataset(model, TOY)
        for i, pair in enumerate(TOY.pairs):
            single_label, single_dist = predict(model, (pair.proposition1, pair.proposition2))
            assert labels[i] == single_label
            assert np.allclose(probs[i], single_dist.probs, atol=1e-12)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        model = train(TOY, TrainConfig(dim=1 << 12, epochs=5))
        path = tmp_path / "model.bin"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.label_set == model.label_set
        assert loaded.dim == model.dim
        assert loaded.config == model.config
        assert np.array_equal(loaded.weights, model.weights)
        assert np.array_equal(loaded.bias, model.bias)
        labels_a, _ = predict_dataset(model, TOY)
        labels_b, _ = predict_dataset(loaded, TOY)
        assert labels_a == labels_b

    def test_save_is_byte_deterministic(self, tmp_path):
        cfg = TrainConfig(dim=1 << 12, epochs=5, seed=4)
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        save_model(train(TOY, cfg), p1)
        save_model(train(TOY, cfg), p2)
        assert p1.read_bytes() == p2.read_bytes()


def test_beats_majority_baseline_on_large_fixture(us_like_dataset):
    train_ds, test_ds = stratified_split(us_like_dataset, SplitSpec())
    cfg = TrainConfig(dim=1 << 16, epochs=10, batch_size=256, learning_rate=0.8)
    model = train(train_ds, cfg)
    labels, _ = predict_dataset(model, test_ds)
    report = evaluate([p.label for p in test_ds.pairs], labels, test_ds.label_set)
    majority = evaluate(
        [p.label for p in test_ds.pairs], ["NO"] * len(test_ds.pairs), test_ds.label_set
    )
    assert abs(majority.macro_f1 - 0.197) <= 1e-3
    assert report.macro_f1 > majority.macro_f1
