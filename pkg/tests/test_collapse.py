import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_graph
from published_tables import COMMUNITIES, FOOD, NO_CONNECTIONS, STRONG, PUBLISHED_MATRIX, TAXI, WEAK
from quotient_cases import CASES
from ecosysna.collapse import (
    InterCommunityMatrix,
    classify_links,
    quotient_graph,
    quotient_mean_weights,
    read_labels,
    write_classification_json,
    write_matrix_csv,
)
from ecosysna.community import aggregate_by_partition
from ecosysna.errors import ConfigError, ValidationError


def published():
    return InterCommunityMatrix.from_entries(8, PUBLISHED_MATRIX, labels=COMMUNITIES)


@pytest.mark.parametrize("labels,edges,expected", CASES)
def test_hand_computed_mean_weights(labels, edges, expected):
    g = make_graph(len(labels), edges)
    m = quotient_mean_weights(g, labels)
    assert m.entries == expected
    assert m.k == max(labels) + 1


def test_formula_example_is_asymmetric():
    g = make_graph(3, [(0, 2, 3), (1, 2, 5)])
    m = quotient_mean_weights(g, [0, 0, 1])
    assert m.get(0, 1) == 4.0 and m.get(1, 0) is None
    assert m.sizes == [2, 1] and m.cross_sums == {(0, 1): 8.0}


def test_published_strong_weak_split():
    cls = classify_links(published(), 10)
    assert {(i, j) for i, j, _ in cls.strong} == STRONG
    assert {(i, j) for i, j, _ in cls.weak} == WEAK
    assert set(cls.no_connections) == NO_CONNECTIONS == {TAXI, FOOD}
    assert sorted(w for *_, w in cls.strong) == [11.6, 15.2, 25.6, 30.2, 34.7, 45.1]
    assert sorted(w for *_, w in cls.weak) == [1.2, 1.2, 1.5, 2.4, 4.2, 4.8]


def test_single_entries_from_the_table():
    m = InterCommunityMatrix.from_entries(2, {(0, 1): 45.1, (1, 0): 1.2})
    cls = classify_links(m, 10)
    assert cls.strong == [(0, 1, 45.1)] and cls.weak == [(1, 0, 1.2)]


def test_classification_order_and_threshold_edge():
    m = InterCommunityMatrix.from_entries(3, {(0, 1): 3, (0, 2): 10, (2, 0): 9.99})
    cls = classify_links(m, 10)
    assert cls.strong == [(0, 2, 10.0)]
    assert cls.weak == [(0, 1, 3.0), (2, 0, 9.99)]
    assert cls.no_connections == [1]
    assert classify_links(published(), 1000).strong == []
    with pytest.raises(ConfigError):
        classify_links(m, 0)


def test_from_entries_validation():
    with pytest.raises(ValidationError):
        InterCommunityMatrix.from_entries(2, {(0, 0): 1})
    with pytest.raises(ValidationError):
        InterCommunityMatrix.from_entries(2, {(0, 2): 1})
    with pytest.raises(ValidationError):
        InterCommunityMatrix.from_entries(2, {(0, 1): 0})


def test_published_quotient_graph():
    q = quotient_graph(published())
    assert q.size()[:2] == (8, 12)
    assert q.labels == COMMUNITIES
    assert q.edge_weight(0, 4) == 45.1


def test_quotient_graph_small_cases():
    assert quotient_graph(InterCommunityMatrix(1, [3])).size() == (1, 0, 0.0)
    m = quotient_mean_weights(make_graph(3, [(0, 2, 3), (1, 2, 5)]), [0, 0, 1])
    q = quotient_graph(m)
    assert q.size() == (2, 1, 4.0) and q.edge_weight(0, 1) == 4.0


def test_matrix_csv_mirrors_table_layout():
    buf = io.StringIO()
    write_matrix_csv(InterCommunityMatrix.from_entries(3, {(0, 1): 4, (2, 0): 1.25}, labels=["A", "B", "C"]), buf)
    assert buf.getvalue().splitlines() == ["From - To,A,B,C", "A,,4,", "B,,,", "C,1.25,,"]


def test_classification_json_uses_labels():
    buf = io.StringIO()
    write_classification_json(classify_links(published()), buf, published())
    doc = json.loads(buf.getvalue())
    assert doc["threshold"] == 10
    assert doc["no_connections"] == ["Online Taxi Services", "Food and Cooking"]
    assert doc["strong"][0] == {"source": "Ticket and Tour Booking",
                                "target": "International Tours and Migration", "weight": 45.1}


def test_read_labels():
    labels = read_labels(io.StringIO("community_id,label\n# note\n0,Food and Cooking\n3,\"Hotels, Suites\"\n"))
    assert labels == {0: "Food and Cooking", 3: "Hotels, Suites"}
    assert read_labels(io.StringIO("1,Bus Ticketing\n")) == {1: "Bus Ticketing"}
    with pytest.raises(ValidationError):
        read_labels(io.StringIO("0,a\nx,b\n"))


# properties

fuzzed = st.integers(2, 12).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 4), min_size=n, max_size=n),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                       st.floats(0.01, 100, allow_nan=False)), min_size=1, max_size=4 * n),
))


def _setup(spec):
    labels, edges = spec
    edges = [e for e in edges if e[0] != e[1]] or [(0, 1, 1.0)]
    return make_graph(len(labels), edges), labels


@settings(max_examples=150, deadline=None)
@given(fuzzed)
def test_reconstruction_identity_against_aggregation(spec):
    g, labels = _setup(spec)
    m = quotient_mean_weights(g, labels)
    agg = aggregate_by_partition(g, labels)
    for i, j, w in m.present():
        cross = agg.edge_weight(i, j)
        assert abs(w * m.sizes[i] * m.sizes[j] - cross) <= 1e-9 * cross
    present = {(i, j) for i, j, _ in m.present()}
    for e in agg.edges():
        if e.src != e.dst:
            assert (e.src, e.dst) in present


@settings(max_examples=100, deadline=None)
@given(fuzzed, st.sampled_from([0.25, 3.0, 7.5]), st.sampled_from([1.0, 5.0, 10.0]))
def test_linear_scaling(spec, c, t):
    g, labels = _setup(spec)
    labels_edges = [(e.src, e.dst, e.weight * c) for e in g.edges()]
    scaled_graph = make_graph(len(labels), labels_edges)
    base = quotient_mean_weights(g, labels)
    scaled = quotient_mean_weights(scaled_graph, labels)
    assert scaled.entries.keys() == base.entries.keys()
    for key, w in base.entries.items():
        assert scaled.entries[key] == pytest.approx(w * c, rel=1e-12)
    a, b = classify_links(base, t), classify_links(scaled, t * c)
    assert [x[:2] for x in a.strong] == [x[:2] for x in b.strong]
    assert [x[:2] for x in a.weak] == [x[:2] for x in b.weak]


@settings(max_examples=100, deadline=None)
@given(fuzzed, st.floats(0.1, 50))
def test_classification_partitions_present_entries(spec, t):
    g, labels = _setup(spec)
    m = quotient_mean_weights(g, labels)
    cls = classify_links(m, t)
    strong = {(i, j) for i, j, _ in cls.strong}
    weak = {(i, j) for i, j, _ in cls.weak}
    assert not strong & weak
    assert strong | weak == set(m.entries)
    assert all(w >= t for *_, w in cls.strong) and all(w < t for *_, w in cls.weak)
    assert all(w >= 0 for w in m.entries.values())
    assert quotient_graph(m).edge_count == len(m.entries)
