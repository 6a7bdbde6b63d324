"""Lempel-Ziv entropy estimates of binary link-state sequences.

For a sequence ``s`` of length ``n`` the estimate is::

    H(s) = n * ln(n) / sum_i Lambda_i

where ``Lambda_i`` is the length of the shortest substring starting at
position ``i`` that does not occur anywhere inside ``s[:i]``.  The first
position has ``Lambda = 1``; when every substring starting at ``i`` up to
the end of the sequence already occurs earlier, ``Lambda_i`` is the length
of the remaining suffix plus one.  Both conventions fall out of
``Lambda_i = 1 + (longest prefix of s[i:] contained in s[:i])``, which is
what the vectorised code computes.

Low values mean long repeated runs (a stable link or stable absence); high
values mean the state keeps producing new patterns.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .tensor import ContactTensor, ProximityTensor

#: Largest horizon for which ``max_entropy(t, "exact")`` is enumerated.
EXACT_MAX_HORIZON = 24

_CHUNK_ROWS = 1 << 18


@dataclass(frozen=True, eq=False)
class EntropyMatrix:
    """Entropy estimate of every pair's sequence over periods ``1..horizon``."""

    values: np.ndarray
    horizon: int
    source: str  # "link" or "proximity"

    def __post_init__(self):
        self.values.setflags(write=False)


def _as_rows(seqs):
    arr = np.asarray(seqs)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError("expected a sequence or a 2-D array of sequences")
    if arr.shape[1] == 0:
        raise ValueError("cannot estimate the entropy of an empty sequence")
    if arr.dtype != bool and not np.isin(arr, (0, 1)).all():
        raise ValueError("sequences must be binary")
    return arr.astype(np.int8)


def longest_prior_match(seqs):
    """Longest match of each suffix inside the preceding prefix.

    ``out[r, k]`` is the largest ``m`` such that ``seqs[r, k:k+m]`` occurs
    as a contiguous substring of ``seqs[r, :k]``.  Runs in ``O(n^2)`` vector
    operations over all rows at once.
    """
    s = _as_rows(seqs)
    rows, n = s.shape
    out = np.zeros((rows, n), dtype=np.int32)
    pos = np.arange(n, dtype=np.int32)
    for d in range(1, n):
        # common extension of positions a and a + d is the distance from a
        # to the next mismatch on this diagonal
        width = n - d
        eq = s[:, :width] == s[:, d:]
        mismatch = np.where(eq, width, pos[:width])
        next_mismatch = np.minimum.accumulate(mismatch[:, ::-1], axis=1)[:, ::-1]
        run = next_mismatch - pos[:width]
        # a match starting d positions back can be at most d long
        np.maximum(out[:, d:], np.minimum(run, d), out=out[:, d:])
    return out


def _lambda_sums(match, horizons):
    """Sum of Lambda over the first ``h`` positions for every ``h``."""
    rows, n = match.shape
    k = np.arange(n)
    sums = np.empty((rows, len(horizons)), dtype=np.int64)
    for col, h in enumerate(horizons):
        lam = 1 + np.minimum(match[:, :h], h - k[:h])
        sums[:, col] = lam.sum(axis=1)
    return sums


def _estimate(sums, horizons):
    h = np.asarray(horizons, dtype=float)
    return h * np.log(h) / sums


def lz_entropy(sequence):
    """Lempel-Ziv entropy estimate (in nats) of one binary sequence."""
    s = _as_rows(sequence)
    if s.shape[0] != 1:
        raise ValueError("lz_entropy takes a single sequence")
    n = s.shape[1]
    sums = _lambda_sums(longest_prior_match(s), [n])
    return float(_estimate(sums, [n])[0, 0])


def lz_entropy_prefixes(seqs):
    """Entropy of every prefix of every row.

    Returns an array of shape ``(rows, n)`` whose column ``h - 1`` holds the
    estimate over the first ``h`` symbols.  A prefix of length ``h`` only
    changes the matches it can see by truncating them at ``h``, so one
    match table serves every horizon.
    """
    s = _as_rows(seqs)
    n = s.shape[1]
    horizons = list(range(1, n + 1))
    return _estimate(_lambda_sums(longest_prior_match(s), horizons), horizons)


def _pair_sequences(tensor, horizon):
    n = tensor.n_nodes
    iu, ju = np.triu_indices(n, k=1)
    return iu, ju, tensor.slices[:horizon, iu, ju].T


def _check_horizon(tensor, horizon):
    if not 1 <= horizon <= tensor.n_periods:
        raise ValueError(f"horizon must be in [1, {tensor.n_periods}], got {horizon}")


def _fill(values_upper, iu, ju, n):
    mat = np.zeros((n, n), dtype=float)
    mat[iu, ju] = values_upper
    mat[ju, iu] = values_upper
    return mat


def _entropy_matrix(tensor, horizon, source):
    _check_horizon(tensor, horizon)
    n = tensor.n_nodes
    iu, ju, seqs = _pair_sequences(tensor, horizon)
    if len(iu) == 0:
        return EntropyMatrix(np.zeros((n, n)), horizon, source)
    uniq, inverse = np.unique(seqs, axis=0, return_inverse=True)
    sums = _lambda_sums(longest_prior_match(uniq), [horizon])
    est = _estimate(sums, [horizon])[:, 0]
    return EntropyMatrix(_fill(est[inverse.ravel()], iu, ju, n), horizon, source)


def link_entropy(tensor, horizon=None):
    """Link-stability entropy of every pair over periods ``1..horizon``."""
    horizon = tensor.n_periods if horizon is None else horizon
    return _entropy_matrix(tensor, horizon, "link")


def proximity_entropy(proximity, horizon=None):
    """Two-hop-proximity entropy of every pair over periods ``1..horizon``."""
    if not isinstance(proximity, ProximityTensor):
        raise TypeError("proximity_entropy expects a ProximityTensor")
    horizon = proximity.n_periods if horizon is None else horizon
    return _entropy_matrix(proximity, horizon, "proximity")


def pair_prefix_entropies(tensor):
    """Prefix entropies of every upper-triangle pair sequence.

    Returns ``(iu, ju, values)`` where ``values[p, t - 1]`` is the estimate
    for pair ``(iu[p], ju[p])`` over periods ``1..t``.  Identical sequences
    are evaluated once.
    """
    iu, ju, seqs = _pair_sequences(tensor, tensor.n_periods)
    if len(iu) == 0:
        return iu, ju, np.zeros((0, tensor.n_periods))
    uniq, inverse = np.unique(seqs, axis=0, return_inverse=True)
    return iu, ju, lz_entropy_prefixes(uniq)[inverse.ravel()]


def entropy_series(tensor, n_periods=None):
    """Entropy matrices for horizons ``1..n_periods``."""
    n_periods = tensor.n_periods if n_periods is None else n_periods
    _check_horizon(tensor, n_periods)
    source = "proximity" if isinstance(tensor, ProximityTensor) else "link"
    iu, ju, values = pair_prefix_entropies(tensor.head(n_periods))
    n = tensor.n_nodes
    return [
        EntropyMatrix(_fill(values[:, t], iu, ju, n), t + 1, source)
        for t in range(n_periods)
    ]


@lru_cache(maxsize=None)
def _exact_max(horizon):
    if horizon == 1:
        return 0.0
    # bit complement leaves the estimate unchanged, so fix the first symbol
    free = horizon - 1
    powers = 1 << np.arange(free - 1, -1, -1, dtype=np.int64)
    best_sum = None
    for start in range(0, 1 << free, _CHUNK_ROWS):
        codes = np.arange(start, min(start + _CHUNK_ROWS, 1 << free), dtype=np.int64)
        bits = np.zeros((len(codes), horizon), dtype=np.int8)
        bits[:, 1:] = (codes[:, None] & powers) > 0
        sums = _lambda_sums(longest_prior_match(bits), [horizon])
        low = int(sums.min())
        best_sum = low if best_sum is None else min(best_sum, low)
    return horizon * np.log(horizon) / best_sum


def max_entropy(horizon, mode="log"):
    """Largest estimate the weighting treats as attainable at ``horizon``.

    ``"log"`` returns ``ln(horizon)``, the bound reached when every Lambda
    equals one.  ``"exact"`` enumerates all binary sequences of that length
    (``horizon <= 24``) and returns the true maximum.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if mode == "log":
        return float(np.log(horizon))
    if mode == "exact":
        if horizon > EXACT_MAX_HORIZON:
            raise ValueError(
                f"exact maximum is only enumerated up to horizon {EXACT_MAX_HORIZON}"
            )
        return float(_exact_max(int(horizon)))
    raise ValueError(f"unknown max-entropy mode {mode!r}")
