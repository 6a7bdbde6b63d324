"""Contact traces: parsing, co-location, discretisation, synthetic generation.

Two text formats are read, both UTF-8 CSV with optional ``#`` comments::

    node_a,node_b,start,end      pairwise contacts
    node,location,start,end      access-point associations

Times are non-negative decimal seconds and intervals are half-open
``[start, end)``.  A header line is recognised by a non-numeric third
field.  Node labels are interned to indices ``0..N-1`` in order of first
appearance; a ``# nodes: a,b,c`` comment before the first record
pre-interns labels in the listed order (written by :func:`write_contacts`
so that isolated nodes survive a round trip).
"""
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from ._validation import check_probability
from .exceptions import TraceFormatError
from .tensor import ContactTensor

NODES_DIRECTIVE = "# nodes:"


@dataclass(frozen=True)
class ContactEvent:
    node_a: int
    node_b: int
    start: float
    end: float

    def __post_init__(self):
        if self.node_a == self.node_b:
            raise ValueError("a contact needs two distinct nodes")
        if self.start > self.end:
            raise ValueError(f"contact starts after it ends ({self.start} > {self.end})")


@dataclass(frozen=True)
class AssociationEvent:
    node: int
    location: int
    start: float
    end: float

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"association starts after it ends ({self.start} > {self.end})")


@dataclass(frozen=True)
class DiscretizationConfig:
    window_start: float
    window_end: float
    period_length: float
    node_universe: tuple = None

    def __post_init__(self):
        if not self.period_length > 0:
            raise ValueError("period_length must be positive")
        if self.window_end <= self.window_start:
            raise ValueError("window_end must be after window_start")
        span = Fraction(self.window_end) - Fraction(self.window_start)
        if span % Fraction(self.period_length):
            raise ValueError("window length is not a multiple of period_length")

    @property
    def n_periods(self):
        span = Fraction(self.window_end) - Fraction(self.window_start)
        return int(span / Fraction(self.period_length))


def _text_lines(source):
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    for raw in source:
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise TraceFormatError(f"invalid UTF-8: {exc}") from None
        yield raw.rstrip("\r\n")


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _parse_time(text, lineno):
    try:
        value = float(text)
    except ValueError:
        raise TraceFormatError(f"invalid time {text!r}", lineno) from None
    if not math.isfinite(value) or value < 0:
        raise TraceFormatError(f"time must be a non-negative number, got {text!r}", lineno)
    return value


class _Interner:
    def __init__(self):
        self.index = {}

    def __call__(self, label):
        if label not in self.index:
            self.index[label] = len(self.index)
        return self.index[label]

    @property
    def labels(self):
        return list(self.index)


def _records(source, interner):
    """Yield ``(lineno, fields)`` for every data record."""
    first = True
    for lineno, line in enumerate(_text_lines(source), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if first and stripped.startswith(NODES_DIRECTIVE):
                for label in stripped[len(NODES_DIRECTIVE):].split(","):
                    if label.strip():
                        interner(label.strip())
            continue
        fields = [f.strip() for f in stripped.split(",")]
        if len(fields) != 4 or not all(fields):
            raise TraceFormatError("expected 4 comma-separated fields", lineno)
        if first and not _is_number(fields[2]):
            first = False
            continue
        first = False
        yield lineno, fields


def read_contacts(source):
    """Parse a pairwise contact CSV into ``(events, labels)``."""
    interner = _Interner()
    events = []
    for lineno, (a, b, start, end) in _records(source, interner):
        start, end = _parse_time(start, lineno), _parse_time(end, lineno)
        if start > end:
            raise TraceFormatError(f"start {start} is after end {end}", lineno)
        if a == b:
            raise TraceFormatError(f"self contact for node {a!r}", lineno)
        events.append(ContactEvent(interner(a), interner(b), start, end))
    return events, interner.labels


def parse_contact_trace(source, format="pairwise-csv"):
    """Contact events of a trace, node labels interned to dense indices."""
    if format != "pairwise-csv":
        raise ValueError(f"unsupported contact trace format {format!r}")
    return read_contacts(source)[0]


def read_associations(source):
    """Parse an association CSV into ``(events, node_labels, location_labels)``."""
    nodes, locations = _Interner(), _Interner()
    events = []
    for lineno, (node, loc, start, end) in _records(source, nodes):
        start, end = _parse_time(start, lineno), _parse_time(end, lineno)
        if start > end:
            raise TraceFormatError(f"start {start} is after end {end}", lineno)
        events.append(AssociationEvent(nodes(node), locations(loc), start, end))
    return events, nodes.labels, locations.labels


def _merge(intervals):
    merged = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return merged


def associations_to_contacts(events):
    """Contacts between nodes associated to the same location at once.

    Every positive-length overlap of two nodes' associations with a common
    location is a contact; overlapping or touching contacts of the same pair
    are merged into maximal intervals.
    """
    by_location = {}
    for ev in events:
        if ev.end > ev.start:
            by_location.setdefault(ev.location, []).append(ev)
    overlaps = {}
    for group in by_location.values():
        group.sort(key=lambda ev: (ev.start, ev.end, ev.node))
        for x, y in combinations(group, 2):
            if x.node == y.node:
                continue
            start, end = max(x.start, y.start), min(x.end, y.end)
            if end > start:
                pair = (min(x.node, y.node), max(x.node, y.node))
                overlaps.setdefault(pair, []).append((start, end))
    contacts = [
        ContactEvent(a, b, start, end)
        for (a, b), spans in overlaps.items()
        for start, end in _merge(spans)
    ]
    contacts.sort(key=lambda ev: (ev.start, ev.node_a, ev.node_b, ev.end))
    return contacts


def discretize(events, config):
    """Binary adjacency per period: a pair is linked in period ``p`` when one
    of its contacts overlaps ``[start + (p-1)t, start + pt)`` for a positive
    duration.

    Without an explicit ``node_universe`` the universe is ``0..max_id``.
    """
    t = config.n_periods
    if config.node_universe is not None:
        position = {node: k for k, node in enumerate(config.node_universe)}
    else:
        top = max((max(ev.node_a, ev.node_b) for ev in events), default=-1)
        position = {node: node for node in range(top + 1)}
    n = len(position)
    slices = np.zeros((t, n, n), dtype=bool)
    w0, w1 = Fraction(config.window_start), Fraction(config.window_end)
    step = Fraction(config.period_length)
    for ev in events:
        start, end = max(Fraction(ev.start), w0), min(Fraction(ev.end), w1)
        if end <= start:
            continue
        try:
            i, j = position[ev.node_a], position[ev.node_b]
        except KeyError as exc:
            raise ValueError(f"node {exc.args[0]} is outside the node universe") from None
        first = math.floor((start - w0) / step)
        last = math.ceil((end - w0) / step) - 1
        slices[first : last + 1, i, j] = True
        slices[first : last + 1, j, i] = True
    return ContactTensor(slices)


def period_counts(window_length, period_lengths):
    """Number of tracked periods for each period length (exact division)."""
    counts = []
    for length in period_lengths:
        n, rem = divmod(Fraction(window_length), Fraction(length))
        if rem or length <= 0:
            raise ValueError(f"period length {length} does not divide window {window_length}")
        counts.append(int(n))
    return counts


@dataclass(frozen=True)
class SyntheticSpec:
    """Two-regime pair model.

    ``stable_pairs`` (a count drawn at random, or explicit index pairs)
    carry an on/off state that persists from one period to the next and
    flips with probability ``flip_prob``; the first state is
    ``initial_state`` or a fair coin.  While on, a stable pair is linked in
    each period with probability ``p_stable``.  Every other pair (or only
    ``noise_pairs`` when given) is linked independently with probability
    ``p_noise`` in each period.
    """

    n_nodes: int
    n_periods: int
    stable_pairs: object = 0
    p_stable: float = 1.0
    flip_prob: float = 0.05
    p_noise: float = 0.0
    initial_state: int = None
    noise_pairs: tuple = field(default=None)

    def __post_init__(self):
        check_probability(self.p_stable, "p_stable")
        check_probability(self.flip_prob, "flip_prob")
        check_probability(self.p_noise, "p_noise")
        if self.n_nodes < 0 or self.n_periods < 1:
            raise ValueError("need n_nodes >= 0 and n_periods >= 1")
        if self.initial_state not in (None, 0, 1):
            raise ValueError("initial_state must be 0, 1 or None")


def _pick_stable(spec, rng, all_pairs):
    if isinstance(spec.stable_pairs, (int, np.integer)):
        k = int(spec.stable_pairs)
        if not 0 <= k <= len(all_pairs):
            raise ValueError(f"cannot pick {k} stable pairs among {len(all_pairs)}")
        chosen = rng.choice(len(all_pairs), size=k, replace=False) if k else []
        return sorted(all_pairs[c] for c in chosen)
    pairs = sorted({(min(a, b), max(a, b)) for a, b in spec.stable_pairs})
    for a, b in pairs:
        if a == b or not 0 <= a < spec.n_nodes or not 0 <= b < spec.n_nodes:
            raise ValueError(f"invalid stable pair ({a}, {b})")
    return pairs


def generate_synthetic(spec, seed=0):
    """Sample a :class:`ContactTensor` from ``spec``; deterministic per seed."""
    rng = np.random.default_rng(seed)
    n, t = spec.n_nodes, spec.n_periods
    all_pairs = list(combinations(range(n), 2))
    stable = _pick_stable(spec, rng, all_pairs)
    if spec.noise_pairs is None:
        taken = set(stable)
        noisy = [p for p in all_pairs if p not in taken]
    else:
        noisy = sorted({(min(a, b), max(a, b)) for a, b in spec.noise_pairs})
    slices = np.zeros((t, n, n), dtype=bool)
    if stable:
        k = len(stable)
        if spec.initial_state is None:
            state = rng.random(k) < 0.5
        else:
            state = np.full(k, bool(spec.initial_state))
        flips = rng.random((t, k)) < spec.flip_prob
        flips[0] = False
        states = np.logical_xor.accumulate(flips, axis=0) ^ state
        states &= rng.random((t, k)) < spec.p_stable
        a, b = np.array(stable).T
        slices[:, a, b] = states
        slices[:, b, a] = states
    if noisy:
        on = rng.random((t, len(noisy))) < spec.p_noise
        a, b = np.array(noisy).T
        slices[:, a, b] |= on
        slices[:, b, a] |= on
    return ContactTensor(slices)


def tensor_to_contacts(tensor, period_length, start=0.0):
    """One contact per maximal run of linked periods of each pair."""
    events = []
    n = tensor.n_nodes
    for i, j in combinations(range(n), 2):
        seq = tensor.slices[:, i, j]
        if not seq.any():
            continue
        padded = np.concatenate([[False], seq, [False]]).astype(np.int8)
        edges = np.flatnonzero(np.diff(padded))
        for first, stop in zip(edges[::2], edges[1::2]):
            events.append(
                ContactEvent(i, j, start + first * period_length, start + stop * period_length)
            )
    events.sort(key=lambda ev: (ev.start, ev.node_a, ev.node_b))
    return events


def _fmt_time(value):
    return repr(float(value)) if value != int(value) else str(int(value))


def write_contacts(events, sink, labels):
    """Write a pairwise contact CSV with a ``# nodes:`` directive."""
    sink.write(f"{NODES_DIRECTIVE} {','.join(labels)}\n")
    sink.write("node_a,node_b,start,end\n")
    for ev in events:
        sink.write(
            f"{labels[ev.node_a]},{labels[ev.node_b]},"
            f"{_fmt_time(ev.start)},{_fmt_time(ev.end)}\n"
        )
