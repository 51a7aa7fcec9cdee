import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dataset, random_bipartite
from oracles import bipartite_adjacency, simple_paths
from interlock.graph import COMPANY, DIRECTOR, build_graph
from interlock.projection import connection_strength_order, indirect_connections, project


@pytest.fixture
def g(fig1_dataset):
    return build_graph(fig1_dataset)


def test_company_projection_edges(g):
    p = project(g, COMPANY)
    assert [(u, v, w) for u, v, w, _ in p.edge_list()] == [
        ("A", "B", 2), ("A", "C", 1), ("B", "C", 1), ("B", "D", 1), ("B", "E", 2),
    ]
    assert p.shared("B", "A") == ("1", "2")
    assert p.shared("E", "B") == ("4", "5")


def test_director_projection(g):
    p = project(g, DIRECTOR)
    assert p.shared("1", "2") == ("A", "B")
    assert p.shared("4", "5") == ("B", "E")
    assert not p.has_edge("1", "6")
    assert p.neighbors("6") == {"4", "5"}


def test_isolated_node_kept():
    p = project(build_graph(make_dataset({"A": ["1"], "B": ["2", "3"]})), COMPANY)
    assert p.nodes == ("A", "B") and p.edges == {}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 10), st.integers(1, 10), st.sampled_from([0.2, 0.4, 0.7]))
def test_weight_is_neighbour_intersection(seed, nc, nd, prob):
    ds = random_bipartite(random.Random(seed), nc, nd, prob)
    graph = build_graph(ds)
    for mode in (COMPANY, DIRECTOR):
        p = project(graph, mode)
        adj = graph.adjacency(mode)
        for u, v in combinations(sorted(adj), 2):
            inter = adj[u] & adj[v]
            assert p.has_edge(u, v) == bool(inter)
            if inter:
                assert p.shared(u, v) == tuple(sorted(inter))
                assert p.weight(u, v) == len(inter)


def by_pair(conns):
    return {c.pair: c for c in conns}


def test_company_indirect_examples(g):
    conns = by_pair(indirect_connections(g, COMPANY))
    assert (conns[("A", "D")].connection_degree, conns[("A", "D")].path_count) == (2, 2)
    assert (conns[("A", "E")].connection_degree, conns[("A", "E")].path_count) == (2, 4)
    assert ("A", "B") not in conns
    assert conns[("A", "E")].paths[0] == ("A", "1", "B", "4", "E")


def test_director_indirect_example(g):
    conns = by_pair(indirect_connections(g, DIRECTOR))
    c = conns[("1", "6")]
    assert (c.connection_degree, c.path_count) == (2, 4)
    assert ("1", "A", "2", "B", "4", "E", "6") in c.paths


def test_strength_order(g):
    ordered = [c.pair for c in connection_strength_order(indirect_connections(g, COMPANY))]
    assert ordered.index(("A", "E")) < ordered.index(("A", "D"))


def test_argument_validation(g):
    for bad in (2, 3, 5):
        with pytest.raises(ValueError):
            indirect_connections(g, COMPANY, max_path_len=bad)
    with pytest.raises(ValueError):
        indirect_connections(g, COMPANY, max_paths_per_pair=0)
    with pytest.raises(KeyError):
        indirect_connections(g, COMPANY, sources=["nope"])


def oracle_indirect(ds, mode, max_len):
    adj = bipartite_adjacency(ds)
    ids = sorted(n[1] for n in adj if n[0] == mode)
    out = {}
    for u, v in combinations(ids, 2):
        if adj[(mode, u)] & adj[(mode, v)]:
            continue
        paths = simple_paths(adj, (mode, u), (mode, v), max_len)
        if paths:
            out[(u, v)] = (min(len(p) for p in paths) // 2, paths)
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 7), st.integers(2, 7), st.sampled_from([0.2, 0.35, 0.5]),
       st.sampled_from([4, 6, 8]))
def test_indirect_matches_exhaustive_search(seed, nc, nd, prob, max_len):
    ds = random_bipartite(random.Random(seed), nc, nd, prob)
    graph = build_graph(ds)
    for mode in (COMPANY, DIRECTOR):
        got = {c.pair: (c.connection_degree, list(c.paths)) for c in indirect_connections(graph, mode, max_len)}
        assert got == oracle_indirect(ds, mode, max_len)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]))
def test_truncation_keeps_lexicographic_prefix(seed, cap):
    ds = random_bipartite(random.Random(seed), 6, 6, 0.45)
    graph = build_graph(ds)
    full = by_pair(indirect_connections(graph, COMPANY))
    capped = by_pair(indirect_connections(graph, COMPANY, max_paths_per_pair=cap))
    assert full.keys() == capped.keys()
    for pair, c in capped.items():
        assert c.paths == full[pair].paths[:cap]
        assert c.truncated == (full[pair].path_count > cap)
        assert c.connection_degree == full[pair].connection_degree


def test_longer_budget_only_adds_paths(g):
    short = by_pair(indirect_connections(g, DIRECTOR, 4))
    long = by_pair(indirect_connections(g, DIRECTOR, 8))
    for pair, c in short.items():
        assert set(c.paths) <= set(long[pair].paths)


def test_sources_orientation(g):
    conns = indirect_connections(g, DIRECTOR, sources=["6"])
    assert {c.pair for c in conns} == {("6", "1"), ("6", "2"), ("6", "3")}
    assert all(p[0] == "6" and p[-1] == c.pair[1] for c in conns for p in c.paths)


def test_sources_subset_of_full(g):
    full = by_pair(indirect_connections(g, DIRECTOR))
    some = indirect_connections(g, DIRECTOR, sources=["1", "6"])
    pairs = [c.pair for c in some]
    assert len(pairs) == len(set(frozenset(p) for p in pairs))
    for c in some:
        key = tuple(sorted(c.pair))
        assert c.path_count == full[key].path_count
