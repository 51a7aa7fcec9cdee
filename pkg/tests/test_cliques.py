import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dataset
from oracles import all_maximal_cliques, graph_as_director_projection, random_graph
from interlock.cliques import (
    clique_stats,
    cliques_containing,
    degeneracy_order,
    ego_network,
    maximal_cliques,
    stats_header,
)
from interlock.graph import COMPANY, DIRECTOR, build_graph
from interlock.projection import project


@pytest.fixture
def companies(fig1_dataset):
    return project(build_graph(fig1_dataset), COMPANY)


@pytest.fixture
def directors(fig1_dataset):
    return project(build_graph(fig1_dataset), DIRECTOR)


def members(cliques):
    return [set(c.members) for c in cliques]


def test_company_cliques(companies):
    assert members(maximal_cliques(companies)) == [{"A", "B", "C"}]


def test_director_cliques(directors):
    cliques = maximal_cliques(directors)
    assert members(cliques) == [{"1", "2", "3", "4", "5"}, {"4", "5", "6"}]
    assert [c.shared_intersection for c in cliques] == [("B",), ("E",)]
    assert cliques[1].shared_union == ("B", "E")


def test_min_size_two_includes_edges(companies):
    assert {"B", "D"} in members(maximal_cliques(companies, 2))
    with pytest.raises(ValueError):
        maximal_cliques(companies, 1)


def test_star_has_no_triangles():
    p = project(build_graph(make_dataset({f"X{i}": ["hub", f"d{i}"] for i in range(5)})), DIRECTOR)
    assert maximal_cliques(p) == []
    assert len(maximal_cliques(p, 2)) == 5


def test_ego_networks(directors):
    assert set(ego_network(directors, "1", 1).subgraph.nodes) == {"1", "2", "3", "4", "5"}
    assert set(ego_network(directors, "6", 1).subgraph.nodes) == {"4", "5", "6"}
    assert set(ego_network(directors, "6", 2).subgraph.nodes) == {"1", "2", "3", "4", "5", "6"}


def test_ego_validation(directors):
    with pytest.raises(KeyError):
        ego_network(directors, "99", 1)
    with pytest.raises(ValueError):
        ego_network(directors, "1", 0)


def test_degeneracy_order_is_permutation(directors):
    order = degeneracy_order(directors.adjacency)
    assert sorted(order) == sorted(directors.nodes)
    assert order[0] == "6"


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12), st.sampled_from([0.2, 0.5, 0.8]))
def test_cliques_match_brute_force(seed, n, p):
    nodes, edges = random_graph(random.Random(seed), n, p)
    proj = project(build_graph(graph_as_director_projection(nodes, edges)), DIRECTOR)
    expected = {c for c in all_maximal_cliques(nodes, edges) if len(c) >= 2}
    got = [frozenset(c.members) for c in maximal_cliques(proj, 2)]
    assert len(got) == len(set(got))
    assert set(got) == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 12), st.sampled_from([0.3, 0.6]))
def test_containing_is_filter_of_all(seed, n, p):
    nodes, edges = random_graph(random.Random(seed), n, p)
    proj = project(build_graph(graph_as_director_projection(nodes, edges)), DIRECTOR)
    everything = maximal_cliques(proj, 3)
    for base in nodes:
        assert cliques_containing(proj, base, 3) == [c for c in everything if base in c.members]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_ego_cliques_are_subsets_of_global(seed, radius):
    nodes, edges = random_graph(random.Random(seed), 10, 0.4)
    proj = project(build_graph(graph_as_director_projection(nodes, edges)), DIRECTOR)
    everything = {frozenset(c.members) for c in maximal_cliques(proj, 2)}
    ego = ego_network(proj, nodes[0], radius).subgraph
    for c in maximal_cliques(ego, 2):
        assert any(set(c.members) <= g for g in everything)


def test_stats_director_six(directors):
    s = clique_stats(directors, "6", radius=1)
    assert (s.neighborhood_nodes, s.neighborhood_entities) == (3, 2)
    assert [c.members for c in s.cliques] == [("4", "5", "6")]
    assert s.largest.shared_intersection == ("E",)


def test_stats_row_director_one(directors):
    row = clique_stats(directors, "1").row()
    assert row == ["1", "6, 5", "1, 5.00", "5, 1", "5, 1", "5, 1", "5, 1"]


def test_stats_without_cliques():
    p = project(build_graph(make_dataset({"X": ["a", "b"], "Y": ["c"]})), DIRECTOR)
    s = clique_stats(p, "c")
    assert s.clique_count == 0 and s.mean_size is None
    assert s.row() == ["c", "1, 1", "0, ", "", "", "", ""]


def test_stats_tie_breaks():
    # base b sits in {a,b,c} sharing X and {b,d,e} sharing Y and Z
    p = project(build_graph(make_dataset({
        "X": ["a", "b", "c"], "Y": ["b", "d", "e"], "Z": ["b", "d", "e"],
    })), DIRECTOR)
    s = clique_stats(p, "b")
    assert s.largest.members == ("b", "d", "e")
    assert s.smallest.members == ("b", "d", "e")
    assert s.most_shared.members == ("b", "d", "e")
    assert s.least_shared.members == ("a", "b", "c")


def test_headers():
    assert stats_header(DIRECTOR) == ["director", "A", "B", "C", "D", "E", "F"]
    assert stats_header(COMPANY) == ["company", "P", "Q", "R", "S", "T", "U"]
