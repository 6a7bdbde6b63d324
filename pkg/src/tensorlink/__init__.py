"""Temporal link prediction for intermittently connected networks.

Recency-weighted Katz scores of a contact tensor, combined with
Lempel-Ziv estimates of how stable each link and each two-hop proximity
has been.
"""
from .entropy import (
    EntropyMatrix,
    entropy_series,
    link_entropy,
    lz_entropy,
    max_entropy,
    proximity_entropy,
)
from .estimator import TensorLinkPredictor
from .evaluation import (
    EvalReport,
    ExperimentConfig,
    GroundTruth,
    accuracy_sweep,
    evaluate,
    run_experiment,
    top_scores_ratio,
)
from .exceptions import (
    ConvergenceError,
    EmptyBenchmarkError,
    EntropyBoundError,
    KnowledgeError,
    TensorFormatError,
    TraceFormatError,
)
from .katz import ScoreMatrix, ego_restrict, katz_scores, katz_truncated, spectral_radius
from .scores import (
    METRICS,
    NormalizedMatrix,
    baseline_scores,
    compute_scores,
    normalize,
    se_score,
    xe_score,
    xes_score,
    xns_score,
)
from .tensor import (
    ContactTensor,
    ProximityTensor,
    coarsen,
    holdout,
    link_sequence,
    load,
    proximity_tensor,
    save,
)
from .trace import (
    AssociationEvent,
    ContactEvent,
    DiscretizationConfig,
    SyntheticSpec,
    associations_to_contacts,
    discretize,
    generate_synthetic,
    parse_contact_trace,
)
from .weighting import CollapsedMatrix, collapse, collapse_xnew

__version__ = "0.1.0"
