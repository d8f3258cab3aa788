import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from util import corpus_graphs, cycle_graph, mkgraph
from wck.errors import GraphError
from wck.graphs import Graph, load_graph

CORPUS = corpus_graphs()


def brute_force_walks(g, k):
    """Independent path count: all edge k-tuples that concatenate in walk order."""
    if k == 0:
        return g.n_vertices
    count = 0
    for combo in itertools.product(range(g.n_edges), repeat=k):
        if all(g.edst[combo[i]] == g.esrc[combo[i + 1]] for i in range(k - 1)):
            count += 1
    return count


def warshall_reach(g):
    n = g.n_vertices
    reach = [[False] * n for _ in range(n)]
    for ei in range(g.n_edges):
        reach[g.esrc[ei]][g.edst[ei]] = True
    for m in range(n):
        for u in range(n):
            for w in range(n):
                reach[u][w] = reach[u][w] or (reach[u][m] and reach[m][w])
    return reach


@st.composite
def small_graphs(draw):
    nv = draw(st.integers(min_value=1, max_value=4))
    ne = draw(st.integers(min_value=1, max_value=6))
    vs = ["v%d" % i for i in range(nv)]
    es = []
    for j in range(ne):
        s = draw(st.integers(min_value=0, max_value=nv - 1))
        r = draw(st.integers(min_value=0, max_value=nv - 1))
        es.append(("e%d" % j, vs[s], vs[r]))
    return mkgraph(vs, es)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_path_counts_match_adjacency_powers(name):
    g = CORPUS[name]
    a = g.adjacency()
    power = np.eye(g.n_vertices, dtype=np.int64)
    for k in range(9):
        assert len(g.paths(k)) == int(power.sum()), (name, k)
        power = a @ power


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_path_counts_match_brute_force(g):
    for k in range(4):
        assert len(g.paths(k)) == brute_force_walks(g, k)


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_transitive_matches_warshall(g):
    reach = warshall_reach(g)
    expected = all(
        reach[u][w]
        for u in range(g.n_vertices)
        for w in range(g.n_vertices)
        if u != w
    )
    assert g.validate().transitive == expected


def test_o2_paths_and_xi():
    g = CORPUS["O2"]
    assert len(g.paths(3)) == 8
    first = g.paths(3)[0]
    assert [g.edges[i].name for i in first.edges] == ["e", "e", "e"]
    assert g.path_str(g.xi(0, 2, "min")) == "e.e"
    assert g.path_str(g.xi(0, 2, "max")) == "f.f"
    assert g.xi(0, 0).edges == ()


def test_paths_level_zero_are_vertices(g2):
    ps = g2.paths(0)
    assert [p.source for p in ps] == [0, 1]
    assert all(len(p) == 0 for p in ps)


def test_shape_reports():
    c3 = CORPUS["C3"].validate()
    assert c3.as_dict() == {
        "no_sources": True,
        "no_sinks": True,
        "transitive": True,
        "is_cycle": True,
        "is_cycle_with_entry": True,
        "out_degree_all_one": True,
    }
    o2 = CORPUS["O2"].validate()
    assert o2.transitive and not o2.is_cycle
    assert o2.no_sources and o2.no_sinks
    assert not o2.out_degree_all_one
    g2 = CORPUS["G2"].validate()
    assert g2.no_sources and g2.no_sinks
    assert not g2.transitive and not g2.is_cycle
    chord = CORPUS["C3chord"].validate()
    assert chord.transitive and not chord.is_cycle
    assert not CORPUS["chain13"].validate().transitive
    assert CORPUS["theta"].validate().transitive


def test_cycle_with_entry_shapes():
    rho = mkgraph(
        ["v1", "v2", "v3"],
        [("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v2")],
    )
    rep = rho.validate()
    assert rep.is_cycle_with_entry and not rep.is_cycle
    assert rep.out_degree_all_one
    assert CORPUS["C2"].validate().is_cycle_with_entry
    # two disjoint loops: degree profile of a cycle but not connected
    two = mkgraph(["v1", "v2"], [("e1", "v1", "v1"), ("e2", "v2", "v2")])
    assert not two.validate().is_cycle
    assert not two.validate().is_cycle_with_entry


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_cycle_unique_path_per_level_and_source(k):
    g = cycle_graph(k)
    for n in range(7):
        ps = g.paths(n)
        assert len(ps) == k
        assert sorted(p.source for p in ps) == list(range(k))


def test_compose_laws(c3):
    a = c3.paths(2)[0]
    b = [p for p in c3.paths(3) if c3.range_of(p) == c3.source_of(a)][0]
    ab = c3.compose(a, b)
    assert len(ab) == 5
    assert c3.source_of(ab) == c3.source_of(b)
    assert c3.range_of(ab) == c3.range_of(a)
    bad = [p for p in c3.paths(3) if c3.range_of(p) != c3.source_of(a)][0]
    with pytest.raises(GraphError):
        c3.compose(a, bad)


def test_walk_order_serialization(c3):
    p = [q for q in c3.paths(2) if q.source == 0][0]
    assert c3.path_str(p) == "e1.e2"
    back = c3.parse_path("e1.e2")
    assert back == p
    with pytest.raises(GraphError):
        c3.parse_path("e1.e1")
    with pytest.raises(GraphError):
        c3.parse_path("e1.nope")


@given(small_graphs(), st.integers(min_value=0, max_value=3))
@settings(max_examples=40, deadline=None)
def test_path_str_round_trip(g, k):
    for p in g.paths(k)[:20]:
        if len(p) == 0:
            continue
        assert g.parse_path(g.path_str(p)) == p
        assert g.path_index(p) == g.paths(k).index(p)


def test_adjacency_example(g2):
    assert g2.adjacency().tolist() == [[1, 0], [1, 1]]


def test_loader_and_errors():
    doc = {
        "vertices": ["v1", "v2"],
        "edges": [{"name": "a", "src": "v1", "dst": "v2"}],
    }
    g = load_graph(json.dumps(doc))
    assert g.n_vertices == 2 and g.n_edges == 1
    assert g.to_dict() == doc
    with pytest.raises(GraphError):
        load_graph("not json")
    with pytest.raises(GraphError):
        load_graph(json.dumps({"vertices": ["v"]}))
    with pytest.raises(GraphError):
        load_graph(
            json.dumps(
                {
                    "vertices": ["v"],
                    "edges": [{"name": "a", "src": "v", "dst": "w"}],
                }
            )
        )
    with pytest.raises(GraphError):
        Graph(["v", "v"], [])
    with pytest.raises(GraphError):
        load_graph(
            json.dumps(
                {
                    "vertices": ["v"],
                    "edges": [
                        {"name": "a", "src": "v", "dst": "v"},
                        {"name": "a", "src": "v", "dst": "v"},
                    ],
                }
            )
        )


def test_xi_requires_extendable_path():
    sink = mkgraph(["v1", "v2"], [("a", "v1", "v2")])
    with pytest.raises(GraphError):
        sink.xi(1, 1)
