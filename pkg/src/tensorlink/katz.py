"""Katz proximity scores and ego-network restriction."""
from collections import deque
from dataclasses import dataclass

import numpy as np

from ._validation import check_beta, check_node, check_square
from .exceptions import ConvergenceError

DESCENDING = "descending"
ASCENDING = "ascending"
DIRECTIONS = (DESCENDING, ASCENDING)

#: beta * spectral radius must stay below this for the series to be accepted.
CONVERGENCE_MARGIN = 0.9


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Pair scores plus the direction in which likelihood increases.

    ``direction="descending"`` means larger values are more likely links;
    ``"ascending"`` means smaller values are.  The diagonal is meaningless.
    """

    values: np.ndarray
    direction: str = DESCENDING
    metric_name: str = "katz"

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("scores must be finite")
        self.values.setflags(write=False)

    def likelihood(self):
        """Scores oriented so that larger always means more likely."""
        return self.values if self.direction == DESCENDING else -self.values

    def with_direction(self, direction):
        return ScoreMatrix(self.values.copy(), direction, self.metric_name)

    def renamed(self, metric_name):
        return ScoreMatrix(self.values.copy(), self.direction, metric_name)


def _values(weights):
    return check_square(getattr(weights, "values", weights), "weights")


def spectral_radius(matrix, tol=1e-6, max_iter=1000):
    """Power-iteration estimate of the spectral radius of a nonnegative matrix.

    Uses the growth ratio of successive iterates, which converges to the
    radius even when ``-rho`` is also an eigenvalue (bipartite supports).
    """
    a = np.abs(_values(matrix))
    n = a.shape[0]
    if n == 0 or not a.any():
        return 0.0
    x = np.full(n, 1.0 / np.sqrt(n))
    estimate = 0.0
    for _ in range(max_iter):
        y = a @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        # two steps so that period-two oscillations average out
        z = a @ (y / norm)
        norm2 = np.linalg.norm(z)
        new = np.sqrt(norm * norm2)
        if abs(new - estimate) <= tol * new:
            return float(new)
        estimate = new
        x = z / norm2
    return float(estimate)


def check_convergence(weights, beta):
    beta = check_beta(beta)
    rho = spectral_radius(weights)
    if beta * rho >= CONVERGENCE_MARGIN:
        raise ConvergenceError(
            f"beta exceeds 1/spectral-radius: beta={beta:g}, rho={rho:g}, "
            f"beta*rho={beta * rho:.3g} >= {CONVERGENCE_MARGIN}"
        )
    return rho


def katz_scores(weights, beta=0.001, metric_name="katz", direction=DESCENDING):
    """Closed-form Katz scores ``(I - beta X)^-1 - I``.

    Solved as ``(I - beta X) S = beta X``, which equals the closed form
    without forming an explicit inverse or subtracting the identity.
    """
    x = _values(weights)
    check_convergence(x, beta)
    n = x.shape[0]
    if n == 0:
        return ScoreMatrix(np.zeros((0, 0)), direction, metric_name)
    bx = beta * x
    try:
        s = np.linalg.solve(np.eye(n) - bx, bx)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"singular Katz system: {exc}") from exc
    if np.allclose(x, x.T):
        s = 0.5 * (s + s.T)
    return ScoreMatrix(s, direction, metric_name)


def katz_truncated(weights, beta=0.001, max_len=60, metric_name="katz"):
    """Partial Katz series ``sum_{l=1..max_len} beta^l X^l``."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    x = _values(weights)
    term = beta * x
    total = term.copy()
    for _ in range(max_len - 1):
        term = beta * (term @ x)
        total += term
    return ScoreMatrix(total, DESCENDING, metric_name)


def _bfs_ball(adj, center, hops):
    seen = {center: 0}
    queue = deque([center])
    while queue:
        u = queue.popleft()
        if seen[u] == hops:
            continue
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v not in seen:
                seen[v] = seen[u] + 1
                queue.append(v)
    return seen


def ego_restrict(tensor, center, hops=2, scope="union"):
    """Nodes the ``center`` knows about, as a sorted index array.

    ``scope="union"`` measures distance in the union graph over all
    periods.  ``scope="per-period"`` keeps the nodes within ``hops`` of the
    center in at least one individual period.
    """
    center = check_node(center, tensor.n_nodes, "center")
    if hops not in (1, 2):
        raise ValueError(f"hops must be 1 or 2, got {hops!r}")
    if scope == "union":
        graphs = [tensor.union_graph()]
    elif scope == "per-period":
        graphs = list(tensor.slices)
    else:
        raise ValueError(f"scope must be 'union' or 'per-period', got {scope!r}")
    members = set()
    for adj in graphs:
        members.update(_bfs_ball(adj, center, hops))
    return np.array(sorted(members), dtype=int)
