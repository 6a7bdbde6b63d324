"""Third-order link-state tensors and their on-disk format.

A :class:`ContactTensor` stacks ``T`` symmetric binary adjacency matrices
over a fixed universe of ``N`` nodes; slice ``t`` records which pairs were
in contact during tracking period ``t``.

Binary file layout (extension ``.dtnz``, all integers little-endian)::

    offset  size  field
    0       5     magic  b"DTNZ\\x00"
    5       2     format version (uint16, currently 1)
    7       4     N (uint32)
    11      4     T (uint32)
    15      ...   T slices, each the full N*N row-major bit matrix,
                  concatenated and packed with ``numpy.packbits``
                  (big-endian bit order, zero padded to a whole byte)
"""
import struct
from dataclasses import dataclass

import numpy as np

from ._validation import check_node, check_slices
from .exceptions import TensorFormatError

MAGIC = b"DTNZ\x00"
FORMAT_VERSION = 1
FILE_EXTENSION = ".dtnz"
_HEADER = struct.Struct("<5sHII")


@dataclass(frozen=True, eq=False)
class ContactTensor:
    """Immutable stack of binary adjacency matrices, shape ``(T, N, N)``."""

    slices: np.ndarray

    def __post_init__(self):
        arr = check_slices(self.slices)
        arr.setflags(write=False)
        object.__setattr__(self, "slices", arr)

    @property
    def n_nodes(self):
        return self.slices.shape[1]

    @property
    def n_periods(self):
        return self.slices.shape[0]

    def __len__(self):
        return self.n_periods

    def __eq__(self, other):
        if not isinstance(other, ContactTensor) or type(other) is not type(self):
            return NotImplemented
        return self.slices.shape == other.slices.shape and bool(
            np.array_equal(self.slices, other.slices)
        )

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(N={self.n_nodes}, T={self.n_periods})"

    def head(self, n_periods):
        """Sub-tensor of the first ``n_periods`` slices."""
        if not 1 <= n_periods <= self.n_periods:
            raise ValueError(f"n_periods must be in [1, {self.n_periods}]")
        return type(self)(self.slices[:n_periods])

    def subgraph(self, nodes):
        """Sub-tensor induced by ``nodes`` (kept in the given order)."""
        idx = np.asarray(nodes, dtype=int)
        return type(self)(self.slices[:, idx[:, None], idx[None, :]])

    def union_graph(self):
        """Boolean adjacency of pairs linked in at least one period."""
        return self.slices.any(axis=0)


class ProximityTensor(ContactTensor):
    """Per-period indicator that two nodes are exactly two hops apart."""


def holdout(tensor):
    """Split ``tensor`` into its first ``T-1`` slices and the final slice."""
    if tensor.n_periods < 2:
        raise ValueError("need at least two periods to hold one out")
    return tensor.head(tensor.n_periods - 1), tensor.slices[-1].copy()


def coarsen(tensor, factor):
    """Merge each run of ``factor`` consecutive periods into one.

    A pair is linked in a merged period if it was linked in any of the
    periods it covers, which is what discretising the underlying contacts
    at a ``factor`` times longer period length produces.
    """
    if factor < 1 or tensor.n_periods % factor:
        raise ValueError(f"factor {factor} does not divide T={tensor.n_periods}")
    n = tensor.n_nodes
    blocks = tensor.slices.reshape(tensor.n_periods // factor, factor, n, n)
    return ContactTensor(blocks.any(axis=1))


def link_sequence(tensor, i, j):
    """Return the 0/1 state of pair ``(i, j)`` in every period."""
    i = check_node(i, tensor.n_nodes, "i")
    j = check_node(j, tensor.n_nodes, "j")
    if i == j:
        raise ValueError("a link sequence needs two distinct nodes")
    return tensor.slices[:, i, j].astype(np.uint8)


def proximity_tensor(tensor):
    """Mark the pairs at graph distance exactly two, slice by slice."""
    z = tensor.slices.astype(np.int32)
    two_step = np.matmul(z, z) > 0
    prox = two_step & ~tensor.slices
    n = tensor.n_nodes
    prox[:, np.arange(n), np.arange(n)] = False
    return ProximityTensor(prox)


def save(tensor, sink):
    """Write ``tensor`` to the binary stream ``sink``."""
    sink.write(_HEADER.pack(MAGIC, FORMAT_VERSION, tensor.n_nodes, tensor.n_periods))
    sink.write(np.packbits(tensor.slices.reshape(-1)).tobytes())


def load(source):
    """Read a tensor written by :func:`save`.

    Raises :class:`TensorFormatError` naming the failed check.
    """
    header = source.read(_HEADER.size)
    if len(header) < _HEADER.size:
        raise TensorFormatError("truncated header")
    magic, version, n, t = _HEADER.unpack(header)
    if magic != MAGIC:
        raise TensorFormatError("bad magic bytes")
    if version != FORMAT_VERSION:
        raise TensorFormatError(f"unsupported format version {version}")
    if t < 1:
        raise TensorFormatError("tensor has no slices")
    n_bits = t * n * n
    n_bytes = (n_bits + 7) // 8
    payload = source.read(n_bytes)
    if len(payload) < n_bytes:
        raise TensorFormatError("truncated payload")
    if source.read(1):
        raise TensorFormatError("trailing bytes after payload")
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    if bits[n_bits:].any():
        raise TensorFormatError("nonzero padding bits")
    slices = bits[:n_bits].reshape(t, n, n).astype(bool)
    if not (slices == slices.transpose(0, 2, 1)).all():
        raise TensorFormatError("asymmetric slice")
    if n and slices[:, np.arange(n), np.arange(n)].any():
        raise TensorFormatError("nonzero diagonal")
    return ContactTensor(slices)
