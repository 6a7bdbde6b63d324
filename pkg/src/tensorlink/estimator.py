"""scikit-learn compatible front end.

>>> from tensorlink import TensorLinkPredictor, generate_synthetic, SyntheticSpec
>>> history = generate_synthetic(SyntheticSpec(10, 16, stable_pairs=5), seed=1)
>>> model = TensorLinkPredictor(metric="xns1").fit(history)
>>> model.predict(3).shape
(3, 2)
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_beta, check_theta
from .evaluation import GroundTruth, evaluate, top_scores_ratio
from .katz import DIRECTIONS
from .scores import KNOWLEDGE_MODES, METRICS, NORMALIZATIONS, predict_scores
from .tensor import ContactTensor
from .weighting import MAX_ENTROPY_MODES


def check_tensor(tensor):
    """Accept a :class:`ContactTensor` or a ``(T, N, N)`` 0/1 array."""
    if isinstance(tensor, ContactTensor):
        return tensor
    return ContactTensor(np.asarray(tensor))


def check_truth(truth, n_nodes):
    if not isinstance(truth, GroundTruth):
        truth = GroundTruth(np.asarray(truth))
    if truth.adjacency.shape[0] != n_nodes:
        raise ValueError(
            f"ground truth covers {truth.adjacency.shape[0]} nodes, model was fit on {n_nodes}"
        )
    return truth


class TensorLinkPredictor(BaseEstimator):
    """Predict the links of the period following a contact tensor.

    Parameters
    ----------
    metric : str, default="katz"
        One of ``katz, xe, se, xes, xns1, xns2, xns3, cn, aa, jaccard``.
    theta : float, default=0.2
        Recency decay of the collapsed tensor, in (0, 1).
    beta : float, default=0.001
        Katz path-length damping.
    knowledge : {"full", "ego1", "ego2"}, default="full"
        Whether scores use the whole network or each node's 1/2-hop ego
        network.
    normalization : {"analytic", "min-max"}, default="analytic"
    max_entropy : {"log", "exact", "observed"}, default="log"
        Maximum entropy used by the XNS weightings.
    ego_scope : {"union", "per-period"}, default="union"
    direction : {"descending", "ascending"} or None, default=None
        Override of the metric's ranking direction.

    Attributes
    ----------
    scores_ : ScoreMatrix
    known_ : ndarray of bool, shape (N, N)
        Pairs that received a score.
    n_nodes_, n_periods_ : int
    """

    def __init__(
        self,
        metric="katz",
        theta=0.2,
        beta=0.001,
        knowledge="full",
        normalization="analytic",
        max_entropy="log",
        ego_scope="union",
        direction=None,
    ):
        self.metric = metric
        self.theta = theta
        self.beta = beta
        self.knowledge = knowledge
        self.normalization = normalization
        self.max_entropy = max_entropy
        self.ego_scope = ego_scope
        self.direction = direction

    def _validate_params(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        check_theta(self.theta)
        check_beta(self.beta)
        for name, allowed in (
            ("knowledge", KNOWLEDGE_MODES),
            ("normalization", NORMALIZATIONS),
            ("max_entropy", MAX_ENTROPY_MODES),
            ("ego_scope", ("union", "per-period")),
        ):
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")
        if self.direction is not None and self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS} or None")

    def fit(self, X, y=None):
        """Score every pair from the tracked periods ``X``."""
        self._validate_params()
        tensor = check_tensor(X)
        scores, known = predict_scores(
            tensor,
            self.metric,
            knowledge=self.knowledge,
            scope=self.ego_scope,
            theta=self.theta,
            beta=self.beta,
            normalization=self.normalization,
            max_mode=self.max_entropy,
        )
        if self.direction is not None and self.direction != scores.direction:
            scores = scores.with_direction(self.direction)
        self.scores_ = scores
        self.known_ = known
        self.n_nodes_ = tensor.n_nodes
        self.n_periods_ = tensor.n_periods
        return self

    def decision_function(self, pairs=None):
        """Likelihood of each pair, larger meaning more likely.

        ``pairs`` is an ``(M, 2)`` index array; by default all known pairs
        ``i < j`` in lexicographic order.
        """
        check_is_fitted(self, "scores_")
        i, j = self._pairs(pairs)
        return self.scores_.likelihood()[i, j]

    def predict(self, n_links):
        """The ``n_links`` most likely known pairs as an ``(n_links, 2)`` array."""
        check_is_fitted(self, "scores_")
        i, j = self._pairs(None)
        if not 0 <= n_links <= len(i):
            raise ValueError(f"n_links must be in [0, {len(i)}]")
        order = np.argsort(-self.scores_.likelihood()[i, j], kind="stable")[:n_links]
        return np.column_stack([i[order], j[order]])

    def score(self, X, y=None):
        """Top-scores ratio against the held-out adjacency ``X``."""
        check_is_fitted(self, "scores_")
        truth = check_truth(X, self.n_nodes_).restricted(self.known_)
        return top_scores_ratio(self.scores_, truth)

    def evaluate(self, truth):
        """Full :class:`~tensorlink.evaluation.EvalReport` against ``truth``."""
        check_is_fitted(self, "scores_")
        return evaluate(self.scores_, check_truth(truth, self.n_nodes_).restricted(self.known_))

    def _pairs(self, pairs):
        if pairs is None:
            iu, ju = np.triu_indices(self.n_nodes_, k=1)
            keep = self.known_[iu, ju]
            return iu[keep], ju[keep]
        arr = np.asarray(pairs, dtype=int)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("pairs must have shape (M, 2)")
        if arr.size and (arr.min() < 0 or arr.max() >= self.n_nodes_):
            raise ValueError("pair index out of range")
        return arr[:, 0], arr[:, 1]
