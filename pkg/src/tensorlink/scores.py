"""Prediction score matrices: Katz, stability-combined metrics, baselines.

Metric names accepted by :func:`compute_scores`:

========  ==========================================================  =========
name      score                                                       direction
========  ==========================================================  =========
katz      Katz scores of the collapsed tensor                          descending
xe        (1 - Xn) * En, collapsed weight against link entropy         ascending
se        (1 - Sn) * En, Katz score against link entropy               ascending
xes       Katz scores of En * (1 - Xn)                                 ascending
xns1      Katz scores of the link-stability weighted collapse         descending
xns2      Katz scores of the proximity-stability weighted collapse    descending
xns3      Katz scores of the collapse weighted by both stabilities    descending
cn        common neighbours in the union graph                         descending
aa        Adamic-Adar index in the union graph                         descending
jaccard   Jaccard coefficient in the union graph                       descending
========  ==========================================================  =========

``Xn``, ``Sn`` and ``En`` are normalised to ``[0, 1]``.
"""
from dataclasses import dataclass

import numpy as np

from ._validation import check_same_shape, check_square
from .entropy import EntropyMatrix, link_entropy
from .exceptions import KnowledgeError
from .katz import (
    ASCENDING,
    DESCENDING,
    ScoreMatrix,
    ego_restrict,
    katz_scores,
)
from .tensor import proximity_tensor
from .weighting import (
    CollapsedMatrix,
    collapse,
    collapse_xnew,
    max_collapsed_weight,
    xnew_matrix,
)

METRICS = ("katz", "xe", "se", "xes", "xns1", "xns2", "xns3", "cn", "aa", "jaccard")
ENTROPY_METRICS = ("xe", "se", "xes", "xns1", "xns2", "xns3")
TWO_HOP_METRICS = ("xns2", "xns3")
BASELINES = {"cn": "common-neighbors", "aa": "adamic-adar", "jaccard": "jaccard"}
NORMALIZATIONS = ("analytic", "min-max")
KNOWLEDGE_MODES = ("full", "ego1", "ego2")

DEFAULT_DIRECTIONS = {
    "katz": DESCENDING,
    "xe": ASCENDING,
    "se": ASCENDING,
    "xes": ASCENDING,
    "xns1": DESCENDING,
    "xns2": DESCENDING,
    "xns3": DESCENDING,
    "cn": DESCENDING,
    "aa": DESCENDING,
    "jaccard": DESCENDING,
}


@dataclass(frozen=True, eq=False)
class NormalizedMatrix:
    values: np.ndarray
    normalization: str

    def __post_init__(self):
        self.values.setflags(write=False)


def _min_max(values):
    n = values.shape[0]
    out = np.zeros_like(values, dtype=float)
    if n < 2:
        return out
    off = ~np.eye(n, dtype=bool)
    lo, hi = values[off].min(), values[off].max()
    if hi > lo:
        out[off] = (values[off] - lo) / (hi - lo)
    return out


def normalize(matrix, method="analytic"):
    """Scale a collapsed, entropy or score matrix into ``[0, 1]``.

    With ``method="analytic"`` a standard collapsed matrix is divided by the
    weight of an always-present link and an entropy matrix by
    ``ln(horizon)``; score matrices and weighted collapses have no practical
    closed-form bound and fall back to min-max over off-diagonal entries.
    """
    if method not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    values = check_square(getattr(matrix, "values", matrix))
    if method == "analytic":
        if isinstance(matrix, CollapsedMatrix) and matrix.kind == "standard":
            out = values / max_collapsed_weight(matrix.n_periods, matrix.theta)
        elif isinstance(matrix, EntropyMatrix):
            bound = np.log(matrix.horizon)
            out = values / bound if bound > 0 else np.zeros_like(values)
        else:
            return NormalizedMatrix(_min_max(values), "min-max")
        label = "divide-by-analytic-max"
    else:
        out, label = _min_max(values), "min-max"
    out = np.clip(out, 0.0, 1.0)
    np.fill_diagonal(out, 0.0)
    return NormalizedMatrix(out, label)


def _pair(a, b, names):
    av = check_square(getattr(a, "values", a), names[0])
    bv = check_square(getattr(b, "values", b), names[1])
    check_same_shape(av, bv, names)
    return av, bv


def xe_score(xn, en):
    """``(1 - Xn) * En``: small for frequent, recent and stable links."""
    x, e = _pair(xn, en, ("Xn", "En"))
    return ScoreMatrix((1.0 - x) * e, ASCENDING, "xe")


def se_score(sn, en):
    """``(1 - Sn) * En`` with ``Sn`` the normalised Katz matrix."""
    s, e = _pair(sn, en, ("Sn", "En"))
    return ScoreMatrix((1.0 - s) * e, ASCENDING, "se")


def xes_score(xn, en, beta=0.001):
    """Katz scores of the instability penalty ``En * (1 - Xn)``."""
    x, e = _pair(xn, en, ("Xn", "En"))
    penalty = e * (1.0 - x)
    np.fill_diagonal(penalty, 0.0)
    return katz_scores(penalty, beta, metric_name="xes", direction=ASCENDING)


def xns_score(
    tensor,
    theta=0.2,
    beta=0.001,
    variant="xns1",
    link_series=None,
    proximity_series=None,
    max_mode="log",
):
    """Katz scores of a stability-weighted collapse.

    When entropy series are supplied they are used as given; otherwise they
    are computed from ``tensor`` (and its two-hop proximity tensor).
    """
    if variant not in ("xns1", "xns2", "xns3"):
        raise ValueError(f"unknown XNS variant {variant!r}")
    kind = "xnew" + variant[-1]
    if link_series is not None or proximity_series is not None:
        weights = collapse_xnew(
            tensor, theta, link_series, proximity_series, kind, max_mode
        )
    else:
        prox = proximity_tensor(tensor) if kind in ("xnew2", "xnew3") else None
        weights = xnew_matrix(tensor, theta, kind, prox, max_mode)
    return katz_scores(weights, beta, metric_name=variant)


def baseline_scores(tensor, metric="common-neighbors"):
    """Neighbourhood-overlap scores on the union graph of all periods."""
    a = tensor.union_graph().astype(float)
    deg = a.sum(axis=1)
    common = a @ a
    if metric == "common-neighbors":
        values, name = common, "cn"
    elif metric == "adamic-adar":
        weight = np.zeros_like(deg)
        hub = deg > 1
        weight[hub] = 1.0 / np.log(deg[hub])
        values, name = (a * weight) @ a, "aa"
    elif metric == "jaccard":
        union = deg[:, None] + deg[None, :] - common
        values = np.divide(common, union, out=np.zeros_like(common), where=union > 0)
        name = "jaccard"
    else:
        raise ValueError(f"unknown baseline {metric!r}")
    values = values.copy()
    np.fill_diagonal(values, 0.0)
    return ScoreMatrix(values, DESCENDING, name)


def compute_scores(
    tensor,
    metric,
    theta=0.2,
    beta=0.001,
    normalization="analytic",
    max_mode="log",
):
    """Full-knowledge score matrix of ``metric`` for the period after ``tensor``."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    if metric in BASELINES:
        return baseline_scores(tensor, BASELINES[metric])
    if metric in ("xns1", "xns2", "xns3"):
        return xns_score(tensor, theta, beta, metric, max_mode=max_mode)
    x = collapse(tensor, theta)
    if metric == "katz":
        return katz_scores(x, beta)
    en = normalize(link_entropy(tensor), normalization)
    xn = normalize(x, normalization)
    if metric == "xe":
        return xe_score(xn, en)
    if metric == "xes":
        return xes_score(xn, en, beta)
    sn = normalize(katz_scores(x, beta), normalization)
    return se_score(sn, en)


def ego_scores(
    tensor,
    metric,
    hops=2,
    scope="union",
    **kwargs,
):
    """Scores computed by each node from its own ego network.

    Each center scores the pairs ``(center, v)`` for ``v`` in its ego set,
    using only the sub-tensor induced by that set.  Both endpoints of a pair
    know each other, and the pair's score is the mean of their two
    estimates.  Returns ``(scores, known)`` where ``known`` marks the pairs
    inside some ego set; entries outside it are zero.
    """
    if hops == 1 and metric in TWO_HOP_METRICS:
        raise KnowledgeError(f"metric requires two-hop knowledge: {metric}")
    n = tensor.n_nodes
    total = np.zeros((n, n))
    count = np.zeros((n, n))
    direction = DEFAULT_DIRECTIONS[metric]
    for center in range(n):
        nodes = ego_restrict(tensor, center, hops, scope)
        if len(nodes) < 2:
            continue
        local = compute_scores(tensor.subgraph(nodes), metric, **kwargs)
        direction = local.direction
        row = local.values[int(np.searchsorted(nodes, center))]
        others = nodes != center
        total[center, nodes[others]] += row[others]
        count[center, nodes[others]] += 1
        total[nodes[others], center] += row[others]
        count[nodes[others], center] += 1
    known = count > 0
    values = np.divide(total, count, out=np.zeros_like(total), where=known)
    return ScoreMatrix(values, direction, metric), known


def predict_scores(tensor, metric, knowledge="full", scope="union", **kwargs):
    """Score matrix and known-pair mask under a knowledge mode."""
    if knowledge not in KNOWLEDGE_MODES:
        raise ValueError(f"knowledge must be one of {KNOWLEDGE_MODES}")
    if knowledge == "full":
        n = tensor.n_nodes
        known = ~np.eye(n, dtype=bool)
        return compute_scores(tensor, metric, **kwargs), known
    hops = 1 if knowledge == "ego1" else 2
    return ego_scores(tensor, metric, hops, scope, **kwargs)
