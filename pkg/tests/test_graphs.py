import json

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from edgemp.errors import InvalidParameterError
from edgemp.graphs import (
    Graph,
    build_binary_tree,
    build_complete,
    build_depth2_tree,
    build_hub_path_graph,
    build_path,
    build_star,
    depth2_vertex,
    diameter,
    hub_path_vertex,
    is_tree,
    light_cone_edges,
    line_graph,
    neighborhood,
    prufer_decode,
    random_tree,
    restricted_ball,
)


@pytest.mark.parametrize("m,nv,ne", [(1, 2, 1), (2, 5, 6), (4, 17, 28)])
def test_hub_path_counts(m, nv, ne):
    g = build_hub_path_graph(m)
    assert (g.num_vertices, g.num_edges) == (nv, ne)
    assert g.num_edges == m * m + m * (m - 1)
    assert all(g.has_edge(0, v) for v in range(1, nv))


def test_hub_path_numbering():
    m = 3
    g = build_hub_path_graph(m)
    for j in range(1, m + 1):
        for i in range(1, m):
            assert g.has_edge(hub_path_vertex(m, i, j), hub_path_vertex(m, i + 1, j))
    assert hub_path_vertex(3, 1, 2) == 4


def test_invalid_sizes():
    for build in (build_hub_path_graph, build_depth2_tree, build_star, build_complete):
        with pytest.raises(InvalidParameterError):
            build(0)
    with pytest.raises(InvalidParameterError):
        random_tree(1, 0)


def test_depth2_tree():
    assert build_depth2_tree(1).edges == ((0, 1), (1, 2))
    g = build_depth2_tree(2)
    assert (g.num_vertices, g.num_edges) == (7, 6)
    g3 = build_depth2_tree(3)
    assert g3.has_edge(2, depth2_vertex(3, 2, 3))
    # the edge {0,u} touches m-1 other hub edges and m leaf edges, plus itself
    assert len(g3.edge_neighbors(g3.edge_id(0, 1))) == 2 * 3


def test_star_and_complete():
    assert build_star(1).num_edges == 1
    assert line_graph(build_star(3)).edges == build_complete(3).edges
    g = build_star(5)
    assert all(len(g.edge_neighbors(e)) == 5 for e in range(5))
    assert build_complete(2).num_edges == 1
    assert build_complete(4).num_edges == 6
    g6 = build_complete(6)
    assert g6.num_edges == 15
    for e in range(15):
        for f in range(15):
            shared = set(g6.endpoints(e)) & set(g6.endpoints(f))
            assert (f in g6.edge_neighbors(e)) == bool(shared)


def test_no_loops_or_duplicates():
    with pytest.raises(InvalidParameterError):
        Graph(3, [(1, 1)])
    with pytest.raises(InvalidParameterError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidParameterError):
        Graph(3, [(0, 3)])


def test_canonical_ids_ignore_input_order():
    a = Graph(4, [(2, 3), (0, 1), (1, 2)])
    b = Graph(4, [(1, 0), (3, 2), (2, 1)])
    assert a.edges == b.edges == ((0, 1), (1, 2), (2, 3))
    assert a == b and hash(a) == hash(b)


def test_neighborhoods_reflexive():
    g = build_star(3)
    assert neighborhood(g, 0) == (0, 1, 2, 3)
    assert neighborhood(g, 1, returns="edges") == (g.edge_id(0, 1),)
    h = build_hub_path_graph(2)
    e = h.edge_id(hub_path_vertex(2, 1, 1), hub_path_vertex(2, 2, 1))
    nb = neighborhood(h, e, of="edge", returns="edges")
    assert e in nb
    assert {h.edge_id(0, 1), h.edge_id(0, 2)} <= set(nb)
    with pytest.raises(InvalidParameterError):
        neighborhood(g, 9)


def test_line_graph_examples():
    assert line_graph(build_path(3)).edges == ((0, 1),)
    assert line_graph(build_star(4)).edges == build_complete(4).edges
    lg = line_graph(build_hub_path_graph(2))
    g = build_hub_path_graph(2)
    assert lg.num_vertices == 6
    hub = g.edge_id(0, 1)
    # three other hub edges and the path edge at (1,1); the other path edge is disjoint from it
    assert len(lg.vertex_neighbors(hub)) - 1 == 4
    assert not lg.has_edge(hub, g.edge_id(3, 4))


def test_restricted_ball():
    m = 3
    g = build_hub_path_graph(m)
    S = [hub_path_vertex(m, 1, j) for j in range(1, 4)]
    assert restricted_ball(g, [0], S, 0) == tuple(sorted(S))
    ring = S + [hub_path_vertex(m, 2, j) for j in range(1, 4)]
    assert restricted_ball(g, [0], S, 1) == tuple(sorted(ring))
    with pytest.raises(InvalidParameterError):
        restricted_ball(g, [0], [0], 1)
    # the last path edges stay outside the light cone for T <= m - 2 and enter it at T = m - 1
    last = [g.edge_id(hub_path_vertex(m, 2, j), hub_path_vertex(m, 3, j)) for j in range(1, 4)]
    assert not set(last) & set(light_cone_edges(g, [0], S, m - 2))
    assert set(last) <= set(light_cone_edges(g, [0], S, m - 1))


def test_random_tree_properties():
    assert random_tree(2, 5).edges == ((0, 1),)
    assert random_tree(5, 7).to_dict() == random_tree(5, 7).to_dict()
    for seed in range(20):
        g = random_tree(10, seed)
        assert g.num_edges == 9 and is_tree(g)


def test_prufer_roundtrip_against_networkx():
    seq = [3, 3, 0, 4]
    ours = sorted(tuple(sorted(e)) for e in prufer_decode(seq, 6))
    theirs = sorted(tuple(sorted(e)) for e in nx.from_prufer_sequence(seq).edges())
    assert ours == theirs


def test_binary_tree_and_diameter():
    g = build_binary_tree(4)
    assert g.num_vertices == 31 and is_tree(g)
    assert diameter(g) == 8
    assert diameter(build_path(30)) == 29


def test_json_roundtrip():
    g = random_tree(12, 3)
    d = json.loads(json.dumps(g.to_dict()))
    h = Graph.from_dict(d)
    assert h == g and h.family == "random_tree" and h.seed == 3


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 9))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph(n, chosen)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_line_graph_invariants(g):
    lg = line_graph(g)
    assert lg.num_vertices == g.num_edges
    for e in range(g.num_edges):
        assert len(lg.vertex_neighbors(e)) - 1 == len(g.edge_neighbors(e)) - 1
    assert nx.is_isomorphic(lg.to_networkx(), nx.line_graph(g.to_networkx()))


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(0, 4), st.data())
def test_restricted_ball_monotone(g, r, data):
    S = data.draw(st.sets(st.integers(0, g.num_vertices - 1), min_size=1))
    rest = [v for v in range(g.num_vertices) if v not in S]
    K = data.draw(st.sets(st.sampled_from(rest)) if rest else st.just(set()))
    assert set(restricted_ball(g, K, S, r)) <= set(restricted_ball(g, K, S, r + 1))
    plain = set()
    for s in S:
        plain |= set(nx.single_source_shortest_path_length(g.to_networkx(), s, cutoff=r))
    assert set(restricted_ball(g, (), S, r)) == plain
