import io
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import colocation_brute
from tensorlink import (
    AssociationEvent,
    ContactEvent,
    DiscretizationConfig,
    SyntheticSpec,
    TraceFormatError,
    associations_to_contacts,
    discretize,
    generate_synthetic,
    link_sequence,
    parse_contact_trace,
)
from tensorlink.trace import (
    period_counts,
    read_associations,
    read_contacts,
    tensor_to_contacts,
    write_contacts,
)


def _parse(text):
    return parse_contact_trace(io.BytesIO(text.encode()))


class TestParseContacts:
    def test_single_record(self):
        assert _parse("a,b,0,10\n") == [ContactEvent(0, 1, 0, 10)]

    def test_reversed_interval(self):
        with pytest.raises(TraceFormatError) as err:
            _parse("a,b,10,0\n")
        assert err.value.line == 1

    def test_empty(self):
        assert _parse("") == []

    def test_header_comments_and_interning(self):
        text = "# exported\nnode_a,node_b,start,end\nx,y,0,5\n\ny,z,1.5,2\n"
        events, labels = read_contacts(io.BytesIO(text.encode()))
        assert labels == ["x", "y", "z"]
        assert events == [ContactEvent(0, 1, 0, 5), ContactEvent(1, 2, 1.5, 2)]

    def test_nodes_directive(self):
        text = "# nodes: q,p,r\np,q,0,1\n"
        events, labels = read_contacts(io.BytesIO(text.encode()))
        assert labels == ["q", "p", "r"]
        assert events == [ContactEvent(1, 0, 0, 1)]

    @pytest.mark.parametrize(
        "text, line",
        [
            ("a,b,0\n", 1),
            ("a,b,0,1\na,b,x,2\n", 2),
            ("a,b,0,1\na,a,0,1\n", 2),
            ("a,b,-1,1\n", 1),
            ("a,b,0,1,2\n", 1),
        ],
    )
    def test_malformed_lines_report_line_number(self, text, line):
        with pytest.raises(TraceFormatError) as err:
            _parse(text)
        assert err.value.line == line

    def test_accepts_text_stream(self):
        assert parse_contact_trace(io.StringIO("a,b,0,1\n")) == [ContactEvent(0, 1, 0, 1)]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            parse_contact_trace(io.BytesIO(b""), format="xml")


class TestAssociations:
    def test_parse(self):
        text = "node,location,start,end\nn1,AP1,0,100\nn2,AP1,50,150\n"
        events, nodes, locs = read_associations(io.BytesIO(text.encode()))
        assert nodes == ["n1", "n2"] and locs == ["AP1"]
        assert events[1] == AssociationEvent(1, 0, 50, 150)

    def test_overlap(self):
        events = [AssociationEvent(0, 0, 0, 100), AssociationEvent(1, 0, 50, 150)]
        assert associations_to_contacts(events) == [ContactEvent(0, 1, 50, 100)]

    def test_different_locations(self):
        events = [AssociationEvent(0, 0, 0, 10), AssociationEvent(1, 1, 0, 10)]
        assert associations_to_contacts(events) == []

    def test_disjoint(self):
        events = [AssociationEvent(0, 0, 0, 10), AssociationEvent(1, 0, 20, 30)]
        assert associations_to_contacts(events) == []

    def test_empty(self):
        assert associations_to_contacts([]) == []

    def test_overlapping_contacts_are_merged(self):
        events = [
            AssociationEvent(0, 0, 0, 10),
            AssociationEvent(1, 0, 0, 5),
            AssociationEvent(0, 1, 4, 20),
            AssociationEvent(1, 1, 4, 12),
        ]
        assert associations_to_contacts(events) == [ContactEvent(0, 1, 0, 12)]

    @given(
        st.lists(
            st.tuples(
                st.integers(0, 4),
                st.integers(0, 2),
                st.integers(0, 100),
                st.integers(0, 100),
            ),
            max_size=12,
        ),
        st.sampled_from([1, 5, 10, 20, 25]),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_per_second_simulation(self, raw, period):
        assocs = [(n, loc, min(a, b), max(a, b)) for n, loc, a, b in raw]
        events = [AssociationEvent(*a) for a in assocs]
        config = DiscretizationConfig(0, 100, period, node_universe=tuple(range(5)))
        tensor = discretize(associations_to_contacts(events), config)
        expected = colocation_brute(assocs, 5, 0, period, 100 // period)
        np.testing.assert_array_equal(tensor.slices, np.array(expected, dtype=bool))


class TestDiscretize:
    def test_overlap_per_period(self):
        tensor = discretize([ContactEvent(0, 1, 0, 10)], DiscretizationConfig(0, 20, 5))
        assert link_sequence(tensor, 0, 1).tolist() == [1, 1, 0, 0]

    def test_zero_length_contact(self):
        tensor = discretize([ContactEvent(0, 1, 5, 5)], DiscretizationConfig(0, 20, 5))
        assert not tensor.slices.any()

    def test_boundary_straddling(self):
        tensor = discretize([ContactEvent(0, 1, 4, 6)], DiscretizationConfig(0, 10, 5))
        assert link_sequence(tensor, 0, 1).tolist() == [1, 1]

    def test_clipping_and_outside_events(self):
        events = [ContactEvent(0, 1, 0, 12), ContactEvent(1, 2, 30, 40), ContactEvent(0, 2, 19, 25)]
        tensor = discretize(events, DiscretizationConfig(10, 20, 5))
        assert link_sequence(tensor, 0, 1).tolist() == [1, 0]
        assert link_sequence(tensor, 1, 2).tolist() == [0, 0]
        assert link_sequence(tensor, 0, 2).tolist() == [0, 1]

    def test_end_on_boundary_is_exclusive(self):
        tensor = discretize([ContactEvent(0, 1, 0, 5)], DiscretizationConfig(0, 10, 5))
        assert link_sequence(tensor, 0, 1).tolist() == [1, 0]

    def test_node_universe(self):
        config = DiscretizationConfig(0, 10, 5, node_universe=(3, 0, 7))
        tensor = discretize([ContactEvent(7, 3, 0, 1)], config)
        assert tensor.n_nodes == 3 and tensor.slices[0, 0, 2]
        with pytest.raises(ValueError):
            discretize([ContactEvent(1, 3, 0, 1)], config)

    @pytest.mark.parametrize(
        "args", [(0, 10, 3), (0, 10, 0), (10, 10, 5), (0, 10, -5)]
    )
    def test_invalid_config(self, args):
        with pytest.raises(ValueError):
            DiscretizationConfig(*args)

    @given(
        st.lists(
            st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 60), st.integers(0, 60)),
            max_size=15,
        ),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_order_independent_and_symmetric(self, raw, shuffler):
        events = [
            ContactEvent(a, b, min(s, e), max(s, e)) for a, b, s, e in raw if a != b
        ]
        config = DiscretizationConfig(0, 60, 6, node_universe=tuple(range(6)))
        tensor = discretize(events, config)
        shuffled = list(events)
        shuffler.shuffle(shuffled)
        assert discretize(shuffled, config) == tensor
        assert (tensor.slices == tensor.slices.transpose(0, 2, 1)).all()


def test_protocol_period_counts():
    assert period_counts(8 * 3600, [300, 600, 1800, 3600]) == [96, 48, 16, 8]
    with pytest.raises(ValueError):
        period_counts(3600, [7 * 60])


class TestSynthetic:
    def test_zero_flip(self):
        spec = SyntheticSpec(2, 8, stable_pairs=[(0, 1)], flip_prob=0.0, initial_state=1)
        tensor = generate_synthetic(spec, seed=0)
        assert link_sequence(tensor, 0, 1).tolist() == [1] * 8

    def test_no_pairs_no_noise(self):
        tensor = generate_synthetic(SyntheticSpec(4, 5, p_noise=0.0), seed=3)
        assert not tensor.slices.any()

    def test_deterministic(self):
        spec = SyntheticSpec(12, 30, stable_pairs=6, p_noise=0.1)
        assert generate_synthetic(spec, 11) == generate_synthetic(spec, 11)
        assert generate_synthetic(spec, 11) != generate_synthetic(spec, 12)

    @pytest.mark.parametrize("field", ["p_noise", "p_stable", "flip_prob"])
    @pytest.mark.parametrize("value", [-0.1, 1.5])
    def test_probability_range(self, field, value):
        with pytest.raises(ValueError):
            SyntheticSpec(3, 3, **{field: value})

    def test_shape_and_invariants(self):
        tensor = generate_synthetic(SyntheticSpec(9, 14, stable_pairs=5, p_noise=0.2), 5)
        assert tensor.n_nodes == 9 and tensor.n_periods == 14

    def test_stable_pairs_have_long_runs(self):
        spec = SyntheticSpec(20, 200, stable_pairs=[(0, 1), (2, 3)], flip_prob=0.02, p_noise=0.0)
        tensor = generate_synthetic(spec, 1)
        seq = link_sequence(tensor, 0, 1)
        assert np.count_nonzero(np.diff(seq)) < 20
        assert not link_sequence(tensor, 4, 5).any()

    def test_p_stable_thins_on_periods(self):
        spec = SyntheticSpec(2, 400, stable_pairs=[(0, 1)], flip_prob=0.0, initial_state=1, p_stable=0.5)
        on = link_sequence(generate_synthetic(spec, 2), 0, 1).mean()
        assert 0.4 < on < 0.6


def test_csv_roundtrip_reproduces_tensor():
    spec = SyntheticSpec(8, 20, stable_pairs=3, p_noise=0.1)
    tensor = generate_synthetic(spec, 4)
    events = tensor_to_contacts(tensor, 300, start=1000)
    buf = io.StringIO()
    write_contacts(events, buf, [f"n{i}" for i in range(8)])
    buf.seek(0)
    parsed, labels = read_contacts(buf)
    config = DiscretizationConfig(1000, 1000 + 20 * 300, 300, node_universe=tuple(range(len(labels))))
    assert discretize(parsed, config) == tensor
