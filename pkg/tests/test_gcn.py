import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgemp.errors import InvalidParameterError
from edgemp.gcn import (
    STAR_PRESETS,
    GcnStack,
    edge_gcn_forward,
    generate_star_dataset,
    init_edge_features_from_nodes,
    node_gcn_forward,
    rmse,
)
from edgemp.graphs import Graph, build_hub_path_graph, build_star, line_graph, random_tree
from edgemp.manifest import dumps
from edgemp.protocols import automorphisms
from edgemp.rng import SeededStream


def feats(rows, width, seed=0):
    return np.array(SeededStream(seed).normals(rows * width)).reshape(rows, width)


def test_zero_weights_identity():
    g = build_hub_path_graph(2)
    x = feats(5, 3)
    for d in (1, 4):
        assert np.array_equal(node_gcn_forward(g, GcnStack.zeros(d, 3), x), x)
    iso = Graph(1, [])
    stack = GcnStack.random(3, 2, SeededStream(1))
    assert np.array_equal(node_gcn_forward(iso, stack, [[0.5, -1.0]]), [[0.5, -1.0]])


def test_edge_equals_node_on_line_graph():
    for seed in range(5):
        g = random_tree(8, seed)
        stack = GcnStack.random(3, 4, SeededStream(seed))
        h = feats(g.num_edges, 4, seed)
        assert edge_gcn_forward(g, stack, h).tobytes() == node_gcn_forward(line_graph(g), stack, h).tobytes()


def test_star_against_dense_reference():
    n, d = 5, 3
    g = build_star(n)
    stack = GcnStack.random(2, d, SeededStream(2))
    h = feats(n, d, 3)
    ref = h.copy()
    for w in stack.weights:
        mean = (ref.sum(axis=0)[None, :] - ref) / (n - 1)
        ref = ref + np.tanh(mean @ w.T)
    assert np.allclose(edge_gcn_forward(g, stack, h), ref, atol=1e-12)


def test_permutation_equivariance():
    g = build_hub_path_graph(2)
    stack = GcnStack.random(2, 3, SeededStream(4))
    x = feats(5, 3, 5)
    out = node_gcn_forward(g, stack, x)
    for pi in automorphisms(g):
        xp = np.empty_like(x)
        xp[list(pi)] = x
        assert np.allclose(node_gcn_forward(g, stack, xp)[list(pi)], out, atol=1e-12)


def test_shape_errors():
    g = build_star(3)
    with pytest.raises(InvalidParameterError):
        node_gcn_forward(g, GcnStack.zeros(1, 3), feats(4, 2))
    with pytest.raises(InvalidParameterError):
        node_gcn_forward(g, GcnStack.zeros(1, 3), feats(3, 3))
    with pytest.raises(InvalidParameterError):
        GcnStack((np.zeros((2, 3)),))


def test_init_edge_features():
    g = build_star(3)
    same = init_edge_features_from_nodes(g, np.ones((4, 3)))
    assert same.shape == (3, 6) and np.all(same == 1)
    x = np.arange(8.0).reshape(4, 2)
    e = init_edge_features_from_nodes(g, x)
    # endpoints are taken in canonical (low, high) order, so swapping roles changes the row
    assert list(e[0]) == [0, 1, 2, 3]
    assert list(e[0]) != list(np.concatenate([x[1], x[0]]))


def test_rmse():
    y = feats(4, 3)
    assert rmse(y, y) == 0
    assert rmse(y + 2.5, y) == pytest.approx(2.5)
    assert rmse([0.0], [3.0]) == 3.0
    with pytest.raises(InvalidParameterError):
        rmse([1.0, 2.0], [1.0])


def test_star_dataset():
    d = generate_star_dataset(16, 3, 10, 2, 7)
    assert dumps(d) == dumps(generate_star_dataset(16, 3, 10, 2, 7))
    s = d["samples"][0]
    assert np.array(s["x"]).shape == np.array(s["y"]).shape == (16, 10)
    assert d["planted"]["sigma"] == "tanh" and len(d["planted"]["weights"]) == 3
    z = generate_star_dataset(4, 2, 3, 1, 0, weight_scale=0.0)
    assert z["samples"][0]["x"] == z["samples"][0]["y"]
    assert sorted(STAR_PRESETS) == sorted((n, k) for n in (16, 32, 64) for k in (1, 3, 5))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 10))
def test_identity_any_depth(depth):
    g = random_tree(6, depth)
    h = feats(5, 2, depth)
    assert np.array_equal(edge_gcn_forward(g, GcnStack.zeros(depth, 2), h), h)
