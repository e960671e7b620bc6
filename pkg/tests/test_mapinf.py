import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgemp.errors import CapExceededError, InvalidParameterError
from edgemp.graphs import Graph, build_hub_path_graph, build_path, hub_path_vertex
from edgemp.mapinf import (
    BOTH_ONE,
    NEQ,
    ZERO,
    brute_force_map,
    build_map_edge_protocol,
    build_proof_lower_bound_instance,
    dp_map_hub_path,
    dp_map_hub_path_batch,
    energy,
    hub_path_layout,
)
from edgemp.protocols import run_protocol


def test_energy_examples():
    g = Graph(2, [(0, 1)])
    assert energy(g, [NEQ], (0, 1)) == 1
    assert energy(g, [NEQ], (0, 0)) == 0
    h = build_hub_path_graph(2)
    for x in itertools.product((0, 1), repeat=5):
        assert energy(h, [ZERO] * 6, x) == 0
    lay = hub_path_layout(2)
    I = [NEQ if e in {p for row in lay.path for p in row} else ZERO for e in range(6)]
    x = [0, 1, 1, 0, 0]  # constant along each path
    assert energy(h, I, x) == 0
    with pytest.raises(InvalidParameterError):
        energy(h, I, x[:-1])


def test_brute_force_examples():
    g = build_hub_path_graph(2)
    assert brute_force_map(g, [ZERO] * 6) == (0,) * 5
    p = build_path(3)
    assert brute_force_map(p, [NEQ, BOTH_ONE]) == (1, 1, 1)
    with pytest.raises(CapExceededError):
        brute_force_map(build_hub_path_graph(5), [ZERO] * 45)


def brute_lex_min(g, I):
    best = None
    for x in itertools.product((0, 1), repeat=g.num_vertices):
        e = energy(g, I, x)
        if best is None or e < best[0]:
            best = (e, x)
    return best[1]


def test_brute_force_matches_pure_python():
    g = build_hub_path_graph(2)
    for k in range(0, 4096, 97):
        I = [(k >> (2 * i)) & 3 for i in range(6)]
        assert brute_force_map(g, I) == brute_lex_min(g, I)


def test_dp_all_zero():
    assert dp_map_hub_path(3, [ZERO] * 15) == (0,) * 10


def test_dp_matches_brute_force_m2_exhaustive():
    g = build_hub_path_graph(2)
    inputs = np.array(list(itertools.product(range(4), repeat=6)))
    batch = dp_map_hub_path_batch(2, inputs)
    for I, row in zip(inputs, batch):
        assert tuple(row) == dp_map_hub_path(2, I) == brute_force_map(g, I)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.data())
def test_dp_matches_brute_force(m, data):
    g = build_hub_path_graph(m)
    I = data.draw(st.lists(st.integers(0, 3), min_size=g.num_edges, max_size=g.num_edges))
    a, b = dp_map_hub_path(m, I), brute_force_map(g, I)
    assert a == b and energy(g, I, a) == energy(g, I, b)


def test_dp_rejects_wrong_graph():
    with pytest.raises(InvalidParameterError):
        dp_map_hub_path(2, [0] * 6, g=build_path(6))


def test_edge_protocol_shape_and_round2_packing():
    m = 3
    p = build_map_edge_protocol(m)
    g = build_hub_path_graph(m)
    lay = hub_path_layout(m)
    I = [(5 * e + 1) % 4 for e in range(g.num_edges)]
    tr = run_protocol(p, g, I)
    assert p.rounds == 3 and tr.max_state_bits == 4
    for j in range(m):
        for i in range(m):
            path_sym = I[lay.path[j][i]] if i < m - 1 else 0
            hub_sym = I[lay.hub[j][i]]
            s = tr.states[2][lay.hub[j][i]]
            assert s == ((path_sym >> 1) & 1, path_sym & 1, (hub_sym >> 1) & 1, hub_sym & 1)
    assert tr.outputs == dp_map_hub_path(m, I)


def test_edge_protocol_needs_m2():
    with pytest.raises(InvalidParameterError):
        build_map_edge_protocol(1)


@pytest.mark.parametrize("m,T", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_lower_bound_instance_pins(m, T):
    inst = build_proof_lower_bound_instance(m, T)
    g = build_hub_path_graph(m)
    assert inst.K == (0,)
    assert inst.S == tuple(hub_path_vertex(m, 1, j) for j in range(1, m + 1))
    lay = hub_path_layout(m)
    hubs = {e for row in lay.hub for e in row}
    assert all(inst.fixed[e] == (ZERO if e in hubs else NEQ) for e in inst.F)
    for y in itertools.product((0, 1), repeat=m):
        x = dp_map_hub_path(m, inst.full_input(y))
        assert tuple(x[v] for v in inst.S) == y
        if m <= 3:
            assert brute_force_map(g, inst.full_input(y)) == x
        # every vertex of path j takes y_j
        for j in range(m):
            assert {x[v] for v in lay.vertex[j]} == {y[j]}
