"""Scoring predictions against the held-out period.

Only unordered pairs ``i < j`` are evaluated, optionally restricted to a
``known`` mask (the pairs some node can score in ego-restricted mode).
Ranks are broken by pair index: among equal scores, ``(i, j)`` comes
before ``(k, l)`` when it is lexicographically smaller.
"""
import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import EmptyBenchmarkError
from .scores import predict_scores


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Adjacency of the held-out period, optionally restricted to known pairs."""

    adjacency: np.ndarray
    known: np.ndarray = None

    def __post_init__(self):
        adj = np.asarray(self.adjacency).astype(bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("ground truth must be a square matrix")
        if not (adj == adj.T).all():
            raise ValueError("ground truth must be symmetric")
        if np.diag(adj).any():
            raise ValueError("ground truth must have a zero diagonal")
        n = adj.shape[0]
        known = ~np.eye(n, dtype=bool) if self.known is None else np.asarray(self.known, dtype=bool)
        if known.shape != adj.shape:
            raise ValueError("known-pair mask must match the ground truth shape")
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "known", known)

    def pairs(self):
        """Evaluated pairs as two index arrays, in lexicographic order."""
        iu, ju = np.triu_indices(self.adjacency.shape[0], k=1)
        keep = self.known[iu, ju]
        return iu[keep], ju[keep]

    @property
    def n_links(self):
        iu, ju = self.pairs()
        return int(self.adjacency[iu, ju].sum())

    def restricted(self, known):
        return GroundTruth(self.adjacency, self.known & np.asarray(known, dtype=bool))


@dataclass(frozen=True)
class EvalReport:
    metric_name: str
    tsr: float
    best_accuracy: float
    precision_at_best_acc: float
    recall_at_best_acc: float
    f_measure: float
    confusion: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _flatten(scores, truth):
    values = getattr(scores, "values", None)
    if values is None or values.shape != truth.adjacency.shape:
        raise ValueError("scores and ground truth must cover the same nodes")
    iu, ju = truth.pairs()
    return iu, ju, scores.likelihood()[iu, ju], truth.adjacency[iu, ju]


def top_scores_ratio(scores, truth):
    """Fraction of the ``L`` best-ranked pairs that are links in the truth."""
    iu, ju, lik, actual = _flatten(scores, truth)
    n_links = int(actual.sum())
    if n_links == 0:
        raise EmptyBenchmarkError("no positive links in benchmark period")
    # pairs already come in lexicographic order, so a stable sort keeps ties ordered
    order = np.argsort(-lik, kind="stable")
    return float(actual[order[:n_links]].sum()) / n_links


def _confusion_curve(lik, actual):
    """Counts for every cut "predict the top k pairs" at distinct scores."""
    order = np.argsort(-lik, kind="stable")
    lik_sorted = lik[order]
    hits = np.concatenate([[0], np.cumsum(actual[order])])
    # cut after the last pair of each group of equal scores, plus "predict none"
    group_end = np.flatnonzero(np.diff(lik_sorted) != 0) + 1
    cuts = np.concatenate([[0], group_end, [len(lik)]]) if len(lik) else np.array([0])
    cuts = np.unique(cuts)
    tp = hits[cuts]
    fp = cuts - tp
    positives = int(actual.sum())
    fn = positives - tp
    tn = len(lik) - positives - fp
    return tp, fp, tn, fn


def _f_measure(precision, recall):
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def accuracy_sweep(scores, truth):
    """Best accuracy over all decision thresholds, with the matching P/R/F.

    The threshold predicts a link for every pair at least as likely as the
    cut score.  Among thresholds with equal accuracy the one predicting
    the fewest links is kept.  ``tsr`` is left at ``nan``; use
    :func:`evaluate` for a complete report.
    """
    _, _, lik, actual = _flatten(scores, truth)
    tp, fp, tn, fn = _confusion_curve(lik, actual)
    best = int(np.argmax(tp + tn))
    tp, fp, tn, fn = (int(v[best]) for v in (tp, fp, tn, fn))
    total = tp + fp + tn + fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return EvalReport(
        metric_name=scores.metric_name,
        tsr=float("nan"),
        best_accuracy=(tp + tn) / total if total else 0.0,
        precision_at_best_acc=precision,
        recall_at_best_acc=recall,
        f_measure=_f_measure(precision, recall),
        confusion={"TP": tp, "FP": fp, "TN": tn, "FN": fn},
    )


def evaluate(scores, truth):
    """Complete :class:`EvalReport` for one score matrix."""
    sweep = accuracy_sweep(scores, truth)
    return EvalReport(
        metric_name=sweep.metric_name,
        tsr=top_scores_ratio(scores, truth),
        best_accuracy=sweep.best_accuracy,
        precision_at_best_acc=sweep.precision_at_best_acc,
        recall_at_best_acc=sweep.recall_at_best_acc,
        f_measure=sweep.f_measure,
        confusion=sweep.confusion,
    )


@dataclass
class ExperimentConfig:
    theta: float = 0.2
    beta: float = 0.001
    knowledge: str = "full"
    normalization: str = "analytic"
    max_entropy: str = "log"
    ego_scope: str = "union"
    directions: dict = field(default_factory=dict)


def run_experiment(tensor, truth, metrics, config=None):
    """Evaluate each metric's prediction of ``truth`` from ``tensor``.

    ``truth`` is a :class:`GroundTruth` or a plain adjacency matrix.  In
    ego-restricted modes every metric is evaluated on the pairs some node
    knows about.
    """
    config = config or ExperimentConfig()
    if not isinstance(truth, GroundTruth):
        truth = GroundTruth(truth)
    if truth.adjacency.shape[0] != tensor.n_nodes:
        raise ValueError(
            f"ground truth covers {truth.adjacency.shape[0]} nodes, tensor {tensor.n_nodes}"
        )
    reports = []
    for metric in metrics:
        scores, known = predict_scores(
            tensor,
            metric,
            knowledge=config.knowledge,
            scope=config.ego_scope,
            theta=config.theta,
            beta=config.beta,
            normalization=config.normalization,
            max_mode=config.max_entropy,
        )
        direction = config.directions.get(metric, scores.direction)
        if direction != scores.direction:
            scores = scores.with_direction(direction)
        reports.append(evaluate(scores, truth.restricted(known)))
    return reports


REPORT_FIELDS = (
    "metric_name",
    "tsr",
    "best_accuracy",
    "precision_at_best_acc",
    "recall_at_best_acc",
    "f_measure",
)
CONFUSION_KEYS = ("TP", "FP", "TN", "FN")


def reports_to_json(reports, scenario=None):
    doc = {"scenario": scenario or {}, "reports": [r.to_dict() for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def reports_to_csv(rows):
    """CSV summary from ``(scenario, report)`` pairs, one row each."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("period_length", "n_periods", "knowledge") + REPORT_FIELDS + CONFUSION_KEYS)
    for scenario, report in rows:
        writer.writerow(
            [scenario["period_length"], scenario["n_periods"], scenario["knowledge"]]
            + [repr(v) if isinstance(v, float) else v for v in (getattr(report, f) for f in REPORT_FIELDS)]
            + [report.confusion[k] for k in CONFUSION_KEYS]
        )
    return buf.getvalue()

