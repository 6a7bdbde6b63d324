"""Input validation helpers shared by the estimators and functions."""
import numbers

import numpy as np


def check_theta(theta):
    if not isinstance(theta, numbers.Real) or not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta!r}")
    return float(theta)


def check_beta(beta):
    if not isinstance(beta, numbers.Real) or not beta > 0.0 or not np.isfinite(beta):
        raise ValueError(f"beta must be a positive finite number, got {beta!r}")
    return float(beta)


def check_probability(p, name):
    if not isinstance(p, numbers.Real) or not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
    return float(p)


def check_square(matrix, name="matrix"):
    """Return ``matrix`` as a finite 2-D float array of shape (N, N)."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_same_shape(a, b, names=("a", "b")):
    if a.shape != b.shape:
        raise ValueError(
            f"shape mismatch: {names[0]} is {a.shape}, {names[1]} is {b.shape}"
        )


def check_slices(slices):
    """Validate a stack of adjacency matrices of shape (T, N, N).

    Returns a boolean copy.  Raises ``ValueError`` naming the first
    violated invariant.
    """
    arr = np.asarray(slices)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"slices must have shape (T, N, N), got {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("a tensor needs at least one slice")
    if arr.dtype != bool:
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("slice entries must be 0 or 1")
        arr = arr.astype(bool)
    else:
        arr = arr.copy()
    if not (arr == arr.transpose(0, 2, 1)).all():
        raise ValueError("asymmetric slice")
    if arr.shape[1] and arr[:, np.arange(arr.shape[1]), np.arange(arr.shape[1])].any():
        raise ValueError("nonzero diagonal")
    return arr


def check_node(node, n_nodes, name="node"):
    if not isinstance(node, numbers.Integral) or not 0 <= node < n_nodes:
        raise ValueError(f"{name} must be an index in [0, {n_nodes}), got {node!r}")
    return int(node)
