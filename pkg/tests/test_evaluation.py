from __future__ import annotations

import random

import pytest

import oracles
from argrel.dataset import PairDataset, write_tsv
from argrel.errors import FormatError, LengthMismatch, ProbabilityError, UnknownLabel
from argrel.evaluation import (
    ConfusionMatrix,
    accuracy,
    confusion,
    cross_domain_report,
    error_distribution,
    evaluate,
    format_macro,
    macro_f1,
    read_prediction_file,
    score_prediction_file,
    write_prediction_file,
)
from argrel.pair_compiler import LabeledPair, STANDARD_LABELS

LABELS = STANDARD_LABELS


def _random_case(rng, n_labels=4, n=200):
    labels = LABELS[:n_labels]
    golds = [rng.choice(labels) for _ in range(n)]
    preds = [rng.choice(labels) for _ in range(n)]
    return golds, preds, labels


class TestConfusion:
    def test_diagonal_when_perfect(self):
        golds = ["RA", "CA", "MA", "NO", "RA"]
        cm = confusion(golds, golds, LABELS)
        assert cm.counts == ((2, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))

    def test_off_diagonal_orientation(self):
        # rows are predicted, columns are gold
        cm = confusion(["RA", "CA"], ["CA", "RA"], LABELS)
        assert cm.counts[1][0] == 1  # predicted CA, gold RA
        assert cm.counts[0][1] == 1  # predicted RA, gold CA

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion(["RA"], ["RA", "CA"], LABELS)

    def test_unknown_label(self):
        with pytest.raises(UnknownLabel):
            confusion(["RA"], ["??"], LABELS)

    def test_matches_brute_force_on_random_case(self):
        rng = random.Random(4)
        golds, preds, labels = _random_case(rng)
        cm = confusion(golds, preds, labels)
        assert [list(row) for row in cm.counts] == oracles.brute_confusion(golds, preds, labels)


class TestMacroF1:
    def test_perfect_predictions(self):
        golds = ["RA", "CA", "MA", "NO"] * 3
        assert macro_f1(confusion(golds, golds, LABELS)) == 1.0

    def test_all_no_majority_value(self):
        golds = ["RA"] * 549 + ["CA"] * 178 + ["MA"] * 141 + ["NO"] * 1611
        preds = ["NO"] * len(golds)
        score = macro_f1(confusion(golds, preds, LABELS))
        p = 1611 / 2479
        expected = (2 * p / (1 + p)) / 4
        assert abs(score - expected) < 1e-12
        assert abs(score - 0.197) <= 1e-3

    def test_two_class_uniform_confusion(self):
        cm = ConfusionMatrix(label_set=("Support", "Attack"), counts=((1, 1), (1, 1)))
        # per class: precision = recall = 0.5 -> F1 = 0.5 -> macro = 0.5
        assert macro_f1(cm) == 0.5

    def test_macro_counts_absent_classes(self):
        golds = ["RA", "RA"]
        preds = ["RA", "RA"]
        assert macro_f1(confusion(golds, preds, LABELS)) == 0.25

    def test_zero_division_convention(self):
        cm = ConfusionMatrix(label_set=("RA", "CA"), counts=((0, 0), (0, 0)))
        assert macro_f1(cm) == 0.0


class TestErrorDistribution:
    def test_diagonal_matrix_all_zero(self):
        golds = ["RA", "CA", "MA", "NO"]
        dist = error_distribution(confusion(golds, golds, LABELS))
        assert all(v == 0.0 for row in dist.values for v in row)

    def test_published_error_matrix_reproduced(self):
        # integer realization of the published misclassification shares
        counts = (
            # gold:   RA    CA    MA    NO      (rows = predicted)
            (3000, 2562, 603, 730),  # RA
            (200, 1000, 138, 226),  # CA
            (100, 377, 500, 44),  # MA
            (700, 2061, 259, 9000),  # NO
        )
        cm = ConfusionMatrix(label_set=LABELS, counts=counts)
        dist = error_distribution(cm)
        published = {
            (0, 1): "0.512", (0, 2): "0.603", (0, 3): "0.730",
            (1, 0): "0.200", (1, 2): "0.138", (1, 3): "0.226",
            (2, 0): "0.100", (2, 1): "0.075", (2, 3): "0.044",
            (3, 0): "0.700", (3, 1): "0.412", (3, 2): "0.259",
        }
        for (p, g), want in published.items():
            assert format(dist.values[p][g], ".3f") == want
        for g in range(4):
            col = sum(dist.values[p][g] for p in range(4))
            assert abs(col - 1.0) <= 1e-9

    def test_columns_sum_to_one(self):
        rng = random.Random(17)
        for _ in range(50):
            golds, preds, labels = _random_case(rng, n=60)
            dist = error_distribution(confusion(golds, preds, labels))
            for g, g_label in enumerate(labels):
                miss = sum(1 for gg, pp in zip(golds, preds) if gg == g_label and pp != g_label)
                col = sum(dist.values[p][g] for p in range(len(labels)))
                if miss:
                    assert abs(col - 1.0) <= 1e-9
                else:
                    assert col == 0.0

    def test_matches_brute_force(self):
        rng = random.Random(23)
        golds, preds, labels = _random_case(rng, n=150)
        dist = error_distribution(confusion(golds, preds, labels))
        expected = oracles.brute_error_distribution(golds, preds, labels)
        for p in range(len(labels)):
            for g in range(len(labels)):
                assert abs(dist.values[p][g] - expected[p][g]) <= 1e-12


class TestPermutationInvariance:
    def test_joint_shuffle_leaves_report_unchanged(self):
        rng = random.Random(5)
        golds, preds, labels = _random_case(rng)
        base = evaluate(golds, preds, labels)
        order = list(range(len(golds)))
        rng.shuffle(order)
        shuffled = evaluate([golds[i] for i in order], [preds[i] for i in order], labels)
        assert base.macro_f1 == shuffled.macro_f1
        assert base.accuracy == shuffled.accuracy
        assert base.confusion == shuffled.confusion


class TestPredictionFiles:
    def _gold(self, tmp_path, golds):
        pairs = tuple(
            LabeledPair(f"premise {i}", f"conclusion {i}", g) for i, g in enumerate(golds)
        )
        path = tmp_path / "gold.tsv"
        write_tsv(PairDataset(pairs=pairs, label_set=LABELS), path)
        return path

    def test_perfect_predictions_score_one(self, tmp_path):
        golds = ["RA", "CA", "MA", "NO"] * 5
        gold_path = self._gold(tmp_path, golds)
        pred_path = tmp_path / "pred.tsv"
        write_prediction_file(pred_path, golds)
        report = score_prediction_file(gold_path, pred_path)
        assert report.macro_f1 == 1.0
        assert report.n == 20

    def test_short_prediction_file(self, tmp_path):
        golds = ["RA", "CA", "NO"]
        gold_path = self._gold(tmp_path, golds)
        pred_path = tmp_path / "pred.tsv"
        write_prediction_file(pred_path, golds[:-1])
        with pytest.raises(LengthMismatch):
            score_prediction_file(gold_path, pred_path)

    def test_hand_built_twenty_line_fixture(self, tmp_path):
        rng = random.Random(12)
        golds = [rng.choice(LABELS) for _ in range(20)]
        preds = [rng.choice(LABELS) for _ in range(20)]
        gold_path = self._gold(tmp_path, golds)
        pred_path = tmp_path / "pred.tsv"
        write_prediction_file(pred_path, preds)
        report = score_prediction_file(gold_path, pred_path)
        assert abs(report.macro_f1 - oracles.brute_macro_f1(golds, preds, LABELS)) <= 1e-12
        assert [list(r) for r in report.confusion.counts] == oracles.brute_confusion(golds, preds, LABELS)
        expected_acc = sum(1 for g, p in zip(golds, preds) if g == p) / 20
        assert report.accuracy == expected_acc

    def test_probability_rows_accepted(self, tmp_path):
        pred_path = tmp_path / "pred.tsv"
        write_prediction_file(pred_path, ["RA", "NO"], [(0.7, 0.1, 0.1, 0.1), (0.25, 0.25, 0.25, 0.25)])
        preds, probs = read_prediction_file(pred_path, LABELS)
        assert preds == ["RA", "NO"]
        assert len(probs) == 2
        assert abs(sum(probs[0]) - 1.0) <= 1e-6

    def test_probability_sum_error(self, tmp_path):
        pred_path = tmp_path / "pred.tsv"
        pred_path.write_text("RA\t0.9\t0.2\t0.0\t0.0\n", encoding="utf-8")
        with pytest.raises(ProbabilityError) as exc:
            read_prediction_file(pred_path, LABELS)
        assert exc.value.line == 1

    def test_mixed_probability_columns_rejected(self, tmp_path):
        pred_path = tmp_path / "pred.tsv"
        pred_path.write_text("RA\t0.7\t0.1\t0.1\t0.1\nNO\n", encoding="utf-8")
        with pytest.raises(FormatError) as exc:
            read_prediction_file(pred_path, LABELS)
        assert exc.value.line == 2

    def test_unknown_label_in_prediction(self, tmp_path):
        pred_path = tmp_path / "pred.tsv"
        pred_path.write_text("XX\n", encoding="utf-8")
        with pytest.raises(FormatError):
            read_prediction_file(pred_path, LABELS)


class TestCrossDomain:
    def _report(self, value):
        golds = ["RA", "CA"]
        rep = evaluate(golds, golds, ("RA", "CA"))
        object.__setattr__(rep, "macro_f1", value)
        return rep

    def test_rounding_rule(self):
        assert format_macro(0.704999) == ".70"
        assert format_macro(0.675) == ".68"
        assert format_macro(0.5) == ".50"
        assert format_macro(1.0) == "1.00"

    def test_seven_columns_fixed_order(self):
        values = {
            "Money": 0.59, "Bank": 0.53, "US2016-test": 0.70, "Welfare": 0.59,
            "MM2012": 0.61, "Problem": 0.56, "Empire": 0.53,
        }
        scored = {name: self._report(v) for name, v in values.items()}
        table = cross_domain_report(scored)
        assert table.columns == (
            "US2016-test", "MM2012", "Bank", "Empire", "Money", "Problem", "Welfare",
        )
        rendered = table.render("roberta-large")
        assert ".70" in rendered and ".61" in rendered

    def test_extra_corpus_appended(self):
        scored = {"US2016-test": self._report(0.7), "Zebra": self._report(0.4), "Alpha": self._report(0.3)}
        table = cross_domain_report(scored)
        assert table.columns == ("US2016-test", "Alpha", "Zebra")

    def test_records_keep_full_precision(self):
        scored = {"US2016-test": self._report(0.704999)}
        assert "0.704999" in cross_domain_report(scored).records()

    def test_single_report(self):
        table = cross_domain_report({"US2016-test": self._report(0.704999)})
        assert format_macro(table.macro_scores["US2016-test"]) == ".70"


def test_accuracy_empty_matrix():
    cm = ConfusionMatrix(label_set=("RA", "CA"), counts=((0, 0), (0, 0)))
    assert accuracy(cm) == 0.0
