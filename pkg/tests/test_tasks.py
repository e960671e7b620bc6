import itertools

import pytest
from hypothesis import given, settings, strategies as st

from edgemp.errors import InvalidParameterError
from edgemp.graphs import build_complete, build_depth2_tree, build_star, depth2_vertex
from edgemp.protocols import bits_to_int, run_protocol
from edgemp.tasks import (
    binary_star_task_g,
    build_counting_edge_protocol,
    build_disjointness_edge_protocol,
    build_histogram_node_protocol,
    build_large_alphabet_edge_protocol,
    counting_lower_bound_instance,
    counting_memory,
    counting_task_g,
    disj,
    disjointness_split,
    disjointness_task_g,
    input_summation,
    large_alphabet_task_g,
)


def counting_input(m, hub=0, subtree_ones=()):
    g = build_depth2_tree(m)
    I = [0] * g.num_edges
    for u in range(1, m + 1):
        I[g.edge_id(0, u)] = hub
    for u, k in enumerate(subtree_ones, start=1):
        for j in range(1, k + 1):
            I[g.edge_id(u, depth2_vertex(m, u, j))] = 1
    return I


def test_counting_examples():
    assert counting_task_g(3, [0] * 12) == (1,) * 4 + (0,) * 9
    # subtree sums 1 and 2: the two hub edges see different summations
    assert counting_task_g(2, counting_input(2, 0, (1, 2)))[:3] == (0, 0, 0)
    assert counting_task_g(2, counting_input(2, 0, (1, 1)))[:3] == (1, 1, 1)


def test_counting_protocol_exhaustive_and_traces():
    for m in (1, 2, 3):
        g = build_depth2_tree(m)
        p = build_counting_edge_protocol(m)
        assert p.memory == counting_memory(m)
        for I in itertools.product((0, 1), repeat=g.num_edges):
            tr = run_protocol(p, g, I)
            assert tr.outputs == counting_task_g(m, I)
            assert tuple(bits_to_int(s) for s in tr.states[2]) == input_summation(g, I)
            # leaf edges only have m+1 neighbours, so their indicator stays 0
            for u in range(1, m + 1):
                for j in range(1, m + 1):
                    assert bits_to_int(tr.states[3][g.edge_id(u, depth2_vertex(m, u, j))]) == 0


def test_counting_instance():
    with pytest.raises(InvalidParameterError):
        counting_lower_bound_instance(3)
    inst = counting_lower_bound_instance(4)
    assert inst.K == (0,) and inst.S == (1, 2)
    assert tuple(counting_task_g(4, inst.full_input((0, 0)))[u] for u in inst.S) == (0, 0)
    outs = {tuple(counting_task_g(4, inst.full_input(x))[u] for u in inst.S) for x in itertools.product((0, 1), repeat=2)}
    assert len(outs) == 4


def test_large_alphabet():
    assert large_alphabet_task_g(4, (1, 2, 3, 4)) == (0,) * 5
    assert large_alphabet_task_g(3, (2, 2, 2)) == (1,) * 4
    assert large_alphabet_task_g(4, (1, 2, 2, 3))[1:] == (0, 1, 1, 0)
    with pytest.raises(InvalidParameterError):
        large_alphabet_task_g(3, (0, 1, 2))
    for n in (1, 3, 4):
        p = build_large_alphabet_edge_protocol(n)
        for I in itertools.product(range(1, n + 1), repeat=n):
            assert run_protocol(p, build_star(n), I).outputs == large_alphabet_task_g(n, I)


def test_histogram_protocol():
    for n in range(1, 6):
        p = build_histogram_node_protocol(n)
        for I in itertools.product((0, 1), repeat=n):
            assert run_protocol(p, build_star(n), I).outputs == binary_star_task_g(n, I)
    assert binary_star_task_g(3, (0, 0, 0))[1:] == (1, 1, 1)
    assert binary_star_task_g(2, (0, 1))[1:] == (0, 0)
    assert binary_star_task_g(3, (1, 1, 0))[1:] == (1, 1, 0)


def test_disjointness_examples():
    g = build_complete(4)
    assert disjointness_task_g(4, [0] * 6) == (0,) * 4
    assert disjointness_task_g(4, [1] * 6) == (1,) * 4
    I = [0] * 6
    I[g.edge_id(0, 1)] = I[g.edge_id(2, 3)] = 1  # {1,2} and its mirror {3,4}
    assert disjointness_task_g(4, I) == (1,) * 4
    with pytest.raises(InvalidParameterError):
        disjointness_task_g(5, [0] * 10)


def test_disj():
    assert disj((1, 0), (0, 1)) == 1
    assert disj((1, 0), (1, 1)) == 0
    with pytest.raises(InvalidParameterError):
        disj((1,), (1, 0))


def test_disjointness_protocol_n4_exhaustive():
    p = build_disjointness_edge_protocol(4)
    g = build_complete(4)
    for I in itertools.product((0, 1), repeat=6):
        tr = run_protocol(p, g, I)
        want = disjointness_task_g(4, I)
        assert tr.outputs == want and tr.max_state_bits == 1
        # after round 6 every edge holds g(I)
        assert all(s == (want[0],) for s in tr.states[6])
        X, Y = disjointness_split(4, I)
        assert want[0] == 1 - disj(X, Y)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([6, 8]), st.data())
def test_disjointness_protocol_random(n, data):
    g = build_complete(n)
    I = data.draw(st.lists(st.integers(0, 1), min_size=g.num_edges, max_size=g.num_edges))
    assert run_protocol(build_disjointness_edge_protocol(n), g, I).outputs == disjointness_task_g(n, I)
