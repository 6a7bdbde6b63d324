import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_tensor
from oracles import best_accuracy_brute, tsr_naive
from tensorlink import (
    ContactTensor,
    EmptyBenchmarkError,
    ExperimentConfig,
    GroundTruth,
    ScoreMatrix,
    accuracy_sweep,
    evaluate,
    run_experiment,
    top_scores_ratio,
)
from tensorlink.evaluation import reports_to_csv, reports_to_json
from tensorlink.scores import compute_scores


def _sym(values):
    m = np.asarray(values, dtype=float)
    return np.triu(m, 1) + np.triu(m, 1).T


def _random_instance(rng, n, ties=False):
    raw = rng.integers(0, 4, (n, n)) if ties else rng.random((n, n))
    scores = _sym(raw)
    truth = np.triu(rng.random((n, n)) < 0.2, 1)
    truth = truth | truth.T
    if not truth[np.triu_indices(n, 1)].any():
        truth[0, 1] = truth[1, 0] = True
    return scores, truth


class TestTopScoresRatio:
    def test_perfect(self):
        s = ScoreMatrix(_sym([[0, 3, 1], [0, 0, 2], [0, 0, 0]]))
        truth = _sym([[0, 1, 0], [0, 0, 1], [0, 0, 0]]).astype(bool)
        assert top_scores_ratio(s, GroundTruth(truth)) == 1.0

    def test_half(self):
        s = ScoreMatrix(_sym([[0, 3, 1], [0, 0, 2], [0, 0, 0]]))
        truth = _sym([[0, 1, 1], [0, 0, 0], [0, 0, 0]]).astype(bool)
        assert top_scores_ratio(s, GroundTruth(truth)) == 0.5

    def test_ascending(self):
        s = ScoreMatrix(_sym([[0, 3, 1], [0, 0, 2], [0, 0, 0]]), "ascending")
        truth = _sym([[0, 0, 1], [0, 0, 0], [0, 0, 0]]).astype(bool)
        assert top_scores_ratio(s, GroundTruth(truth)) == 1.0

    def test_ties_break_lexicographically(self):
        s = ScoreMatrix(np.zeros((3, 3)))
        first = _sym([[0, 1, 0], [0, 0, 0], [0, 0, 0]]).astype(bool)
        last = _sym([[0, 0, 0], [0, 0, 1], [0, 0, 0]]).astype(bool)
        assert top_scores_ratio(s, GroundTruth(first)) == 1.0
        assert top_scores_ratio(s, GroundTruth(last)) == 0.0

    def test_no_links(self):
        with pytest.raises(EmptyBenchmarkError, match="no positive links in benchmark period"):
            top_scores_ratio(ScoreMatrix(np.zeros((3, 3))), GroundTruth(np.zeros((3, 3))))

    def test_known_mask(self):
        s = ScoreMatrix(_sym([[0, 5, 1], [0, 0, 2], [0, 0, 0]]))
        truth = _sym([[0, 0, 1], [0, 0, 1], [0, 0, 0]]).astype(bool)
        known = _sym([[0, 0, 1], [0, 0, 1], [0, 0, 0]]).astype(bool)
        assert top_scores_ratio(s, GroundTruth(truth, known)) == 1.0


class TestAccuracy:
    def test_perfect_separation(self):
        s = ScoreMatrix(_sym([[0, 3, 1], [0, 0, 2], [0, 0, 0]]))
        truth = _sym([[0, 1, 0], [0, 0, 1], [0, 0, 0]]).astype(bool)
        r = evaluate(s, GroundTruth(truth))
        assert r.best_accuracy == 1.0 and r.f_measure == 1.0
        assert r.confusion == {"TP": 2, "FP": 0, "TN": 1, "FN": 0}

    def test_predict_none_wins(self):
        s = ScoreMatrix(_sym([[0, 3, 1, 1], [0, 0, 1, 1], [0, 0, 0, 1], [0, 0, 0, 0]]))
        truth = _sym([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]]).astype(bool)
        r = accuracy_sweep(s, GroundTruth(truth))
        assert r.confusion["TP"] == 0 and r.confusion["FP"] == 0
        assert r.f_measure == 0.0 and r.precision_at_best_acc == 0.0
        assert math.isnan(r.tsr)

    def test_all_equal_scores(self):
        truth = _sym([[0, 1, 1], [0, 0, 1], [0, 0, 0]]).astype(bool)
        r = evaluate(ScoreMatrix(np.zeros((3, 3))), GroundTruth(truth))
        assert r.best_accuracy == 1.0 and r.recall_at_best_acc == 1.0

    @pytest.mark.parametrize("ties", [False, True])
    def test_matches_brute_force(self, rng, ties):
        for _ in range(100):
            n = int(rng.integers(2, 31))
            scores, truth = _random_instance(rng, n, ties)
            r = evaluate(ScoreMatrix(scores), GroundTruth(truth))
            assert r.tsr == tsr_naive(scores.tolist(), truth.tolist())
            acc, p, rec, f, conf = best_accuracy_brute(scores.tolist(), truth.tolist())
            assert (r.best_accuracy, r.precision_at_best_acc, r.recall_at_best_acc, r.f_measure) == (
                acc,
                p,
                rec,
                f,
            )
            assert tuple(r.confusion[k] for k in ("TP", "FP", "TN", "FN")) == conf

    @given(st.integers(2, 12), st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_report_invariants(self, n, seed):
        scores, truth = _random_instance(np.random.default_rng(seed), n, ties=True)
        r = evaluate(ScoreMatrix(scores), GroundTruth(truth))
        for v in (r.tsr, r.best_accuracy, r.precision_at_best_acc, r.recall_at_best_acc, r.f_measure):
            assert 0.0 <= v <= 1.0
        assert sum(r.confusion.values()) == n * (n - 1) // 2
        assert r.best_accuracy >= 1 - truth[np.triu_indices(n, 1)].mean() - 1e-12


class TestGroundTruth:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            GroundTruth(np.triu(np.ones((3, 3)), 1))

    def test_n_links(self):
        truth = _sym([[0, 1, 1], [0, 0, 0], [0, 0, 0]])
        assert GroundTruth(truth).n_links == 2

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(ScoreMatrix(np.zeros((4, 4))), GroundTruth(np.zeros((3, 3))))


class TestExperiment:
    def test_run_and_serialise(self, rng):
        tensor = random_tensor(rng, 8, 10, 0.3)
        truth = random_tensor(rng, 8, 1, 0.4).slices[0]
        reports = run_experiment(tensor, truth, ["katz", "xe", "xns1"])
        assert [r.metric_name for r in reports] == ["katz", "xe", "xns1"]
        doc = json.loads(reports_to_json(reports, {"period_length": 300}))
        assert doc["scenario"]["period_length"] == 300
        assert set(doc["reports"][0]) == {
            "metric_name",
            "tsr",
            "best_accuracy",
            "precision_at_best_acc",
            "recall_at_best_acc",
            "f_measure",
            "confusion",
        }
        scenario = {"period_length": 300, "n_periods": 10, "knowledge": "full"}
        rows = list(csv.DictReader(io.StringIO(reports_to_csv([(scenario, r) for r in reports]))))
        assert len(rows) == 3 and float(rows[0]["tsr"]) == reports[0].tsr
        assert int(rows[2]["TP"]) == reports[2].confusion["TP"]

    def test_direction_override(self, rng):
        tensor = random_tensor(rng, 6, 6, 0.3)
        truth = random_tensor(rng, 6, 1, 0.5).slices[0]
        plain = run_experiment(tensor, truth, ["xe"])[0]
        flipped = run_experiment(tensor, truth, ["xe"], ExperimentConfig(directions={"xe": "descending"}))[0]
        scores = compute_scores(tensor, "xe").with_direction("descending")
        assert flipped == evaluate(scores, GroundTruth(truth))
        assert plain == evaluate(compute_scores(tensor, "xe"), GroundTruth(truth))

    def test_ego_restricts_truth(self, rng):
        z = np.zeros((3, 4, 4), dtype=bool)
        z[:, 0, 1] = z[:, 1, 0] = True
        truth = np.zeros((4, 4), dtype=bool)
        truth[0, 1] = truth[1, 0] = truth[2, 3] = truth[3, 2] = True
        r = run_experiment(ContactTensor(z), truth, ["katz"], ExperimentConfig(knowledge="ego2"))[0]
        assert r.tsr == 1.0 and sum(r.confusion.values()) == 1
