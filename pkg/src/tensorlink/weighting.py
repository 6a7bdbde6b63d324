"""Recency-weighted collapsing of a contact tensor into one matrix."""
from dataclasses import dataclass

import numpy as np

from ._validation import check_theta
from .entropy import EntropyMatrix, max_entropy, pair_prefix_entropies
from .exceptions import EntropyBoundError

XNEW_VARIANTS = ("xnew1", "xnew2", "xnew3")
MAX_ENTROPY_MODES = ("log", "exact", "observed")


@dataclass(frozen=True, eq=False)
class CollapsedMatrix:
    """Weighted adjacency obtained by collapsing ``n_periods`` slices."""

    values: np.ndarray
    theta: float
    kind: str  # "standard", "xnew1", "xnew2" or "xnew3"
    n_periods: int

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n_nodes(self):
        return self.values.shape[0]


def decay_weights(n_periods, theta, power=1):
    """``(1 - theta) ** (power * (T - p))`` for ``p = 1..T``."""
    return (1.0 - theta) ** (power * np.arange(n_periods - 1, -1, -1, dtype=float))


def max_collapsed_weight(n_periods, theta):
    """Weight of a pair linked in every period, the largest entry possible."""
    return float(decay_weights(n_periods, theta).sum())


def collapse(tensor, theta=0.2):
    """Sum the slices with weight decaying geometrically into the past.

    ``X[i, j] = sum_p (1 - theta) ** (T - p) * Z_p[i, j]``
    """
    theta = check_theta(theta)
    w = decay_weights(tensor.n_periods, theta)
    values = np.tensordot(w, tensor.slices.astype(float), axes=1)
    return CollapsedMatrix(values, theta, "standard", tensor.n_periods)


def _required(variant):
    if variant not in XNEW_VARIANTS:
        raise ValueError(f"variant must be one of {XNEW_VARIANTS}, got {variant!r}")
    return {
        "xnew1": ("link",),
        "xnew2": ("proximity",),
        "xnew3": ("link", "proximity"),
    }[variant]


def _stack(series, n_periods, name):
    if series is None:
        raise ValueError(f"{name} entropy series is required for this variant")
    if isinstance(series, EntropyMatrix):
        series = [series]
    if len(series) != n_periods:
        raise ValueError(
            f"{name} entropy series must hold one matrix per period "
            f"({n_periods}), got {len(series)}"
        )
    for t, mat in enumerate(series, start=1):
        if mat.horizon != t:
            raise ValueError(f"{name} entropy series element {t} has horizon {mat.horizon}")
    return np.stack([mat.values for mat in series])


def entropy_maxima(n_periods, mode="log", observed=None):
    """Per-horizon entropy maxima used in the stability brackets.

    ``observed`` is a sequence of ``(T, ...)`` entropy arrays; with
    ``mode="observed"`` the maximum is taken over every pair of every array
    at each horizon.
    """
    if mode == "observed":
        if not observed:
            raise ValueError("observed maxima need entropy values")
        per = [np.asarray(v).reshape(n_periods, -1) for v in observed]
        flat = np.concatenate(per, axis=1)
        return flat.max(axis=1) if flat.shape[1] else np.zeros(n_periods)
    if mode not in MAX_ENTROPY_MODES:
        raise ValueError(f"max-entropy mode must be one of {MAX_ENTROPY_MODES}")
    return np.array([max_entropy(t, mode) for t in range(1, n_periods + 1)])


def _brackets(series, maxima, name):
    shape = (-1,) + (1,) * (series.ndim - 1)
    bracket = maxima.reshape(shape) - series
    if (bracket < -1e-12).any():
        raise EntropyBoundError(
            f"{name} entropy exceeds the maximum entropy at some horizon"
        )
    return np.maximum(bracket, 0.0)


def _xnew_sum(z, theta, brackets):
    t = z.shape[0]
    power = 1 + len(brackets)
    w = decay_weights(t, theta, power)
    terms = z.astype(float)
    for b in brackets:
        terms = terms * b
    return np.tensordot(w, terms, axes=1)


def collapse_xnew(
    tensor,
    theta=0.2,
    link_entropy=None,
    proximity_entropy=None,
    variant="xnew1",
    max_mode="log",
):
    """Collapse with each period's weight scaled by pair stability.

    ``link_entropy`` and ``proximity_entropy`` are prefix entropy series
    (one :class:`EntropyMatrix` per horizon ``1..T``, see
    :func:`tensorlink.entropy.entropy_series`).  A linked period ``t``
    contributes ``(max_t - E_t[i, j])`` per entropy source used, and the
    recency decay exponent grows by one for each source.
    """
    theta = check_theta(theta)
    needed = _required(variant)
    t = tensor.n_periods
    stacks = {}
    if "link" in needed:
        stacks["link"] = _stack(link_entropy, t, "link")
    if "proximity" in needed:
        stacks["proximity"] = _stack(proximity_entropy, t, "proximity")
    maxima = entropy_maxima(t, max_mode, observed=list(stacks.values()))
    brackets = [_brackets(stacks[name], maxima, name) for name in needed]
    values = _xnew_sum(tensor.slices, theta, brackets)
    return CollapsedMatrix(values, theta, variant, t)


def xnew_matrix(tensor, theta=0.2, variant="xnew1", proximity=None, max_mode="log"):
    """Same result as :func:`collapse_xnew` computed pair-wise.

    Avoids materialising ``T`` dense entropy matrices: prefix entropies
    are computed once per distinct pair sequence.
    """
    theta = check_theta(theta)
    needed = _required(variant)
    if "proximity" in needed and proximity is None:
        raise ValueError("proximity tensor is required for this variant")
    n, t = tensor.n_nodes, tensor.n_periods
    iu, ju = np.triu_indices(n, k=1)
    prefix = {}
    if "link" in needed:
        prefix["link"] = pair_prefix_entropies(tensor)[2].T
    if "proximity" in needed:
        prefix["proximity"] = pair_prefix_entropies(proximity)[2].T
    maxima = entropy_maxima(t, max_mode, observed=list(prefix.values()))
    brackets = [_brackets(prefix[name], maxima, name) for name in needed]
    upper = _xnew_sum(tensor.slices[:, iu, ju], theta, brackets)
    values = np.zeros((n, n))
    values[iu, ju] = upper
    values[ju, iu] = upper
    return CollapsedMatrix(values, theta, variant, t)
