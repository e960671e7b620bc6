"""Separation tasks and the protocols that solve them.

* counting task on the depth-two tree, solved by a symmetric 3-round edge
  protocol with logarithmic memory;
* duplicate detection on a star with a large alphabet (symmetric edge
  protocol), and its binary-alphabet variant solved by a 2-round node
  protocol that only needs the hub's histogram;
* the mirrored-pair task on the complete graph, solved by a 6-round edge
  protocol with one bit per edge, and its link to set disjointness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidParameterError
from .graphs import (
    Graph,
    build_complete,
    build_depth2_tree,
    build_star,
    depth2_vertex,
    light_cone_edges,
)
from .protocols import (
    EdgeProtocol,
    NodeProtocol,
    SymmetricEdgeProtocol,
    bits_to_int,
    int_to_bits,
    zeros,
)


def _binary_input(g: Graph, inputs: Sequence[int]) -> tuple[int, ...]:
    inputs = tuple(int(x) for x in inputs)
    if len(inputs) != g.num_edges:
        raise InvalidParameterError(f"expected {g.num_edges} inputs, got {len(inputs)}")
    if any(x not in (0, 1) for x in inputs):
        raise InvalidParameterError("inputs must be bits")
    return inputs


# -- counting task -----------------------------------------------------------------


def input_summation(g: Graph, inputs: Sequence[int]) -> tuple[int, ...]:
    """For every edge, the sum of inputs over its closed edge neighbourhood."""
    return tuple(sum(inputs[f] for f in g.edge_neighbors(e)) for e in range(g.num_edges))


def counting_task_g(m: int, inputs: Sequence[int], g: Graph | None = None) -> tuple[int, ...]:
    """Middle vertex ``u`` outputs 1 iff more than ``m+1`` edges around ``{0,u}`` share its input summation.

    Leaves output 0 and the root outputs the OR of the middle vertices.
    """
    tree = build_depth2_tree(m)
    if g is not None and g != tree:
        raise InvalidParameterError("graph is not the depth-two tree for this m")
    inputs = _binary_input(tree, inputs)
    C = input_summation(tree, inputs)
    out = [0] * tree.num_vertices
    for u in range(1, m + 1):
        e = tree.edge_id(0, u)
        same = sum(1 for f in tree.edge_neighbors(e) if C[f] == C[e])
        out[u] = int(same > m + 1)
    out[0] = int(any(out[1 : m + 1]))
    return tuple(out)


def counting_memory(m: int) -> int:
    return max(1, math.ceil(math.log2(2 * m + 2)))


def build_counting_edge_protocol(m: int) -> SymmetricEdgeProtocol:
    """Load input, sum the closed neighbourhood, test for more than ``m+1`` equal sums; OR at vertices.

    The edge itself appears in both endpoint multisets, so neighbourhood totals
    subtract one copy of it.
    """
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    B = counting_memory(m)

    def rule(t, x, own, sides):
        if t == 1:
            return int_to_bits(x, B)
        me = bits_to_int(own)
        if t == 2:
            total = sum(bits_to_int(s) for side in sides for s in side) - me
            return int_to_bits(total, B)
        same = sum(1 for side in sides for s in side if bits_to_int(s) == me) - 1
        return int_to_bits(int(same > m + 1), B)

    def aggregate(states):
        return int(any(bits_to_int(s) for s in states))

    return SymmetricEdgeProtocol(3, rule, aggregate, memory=B, name=f"counting[m={m}]")


@dataclass(frozen=True)
class CountingLowerBoundInstance:
    m: int
    K: tuple[int, ...]
    S: tuple[int, ...]
    F: tuple[int, ...]
    fixed: dict[int, int]

    def completion(self, x: Sequence[int]) -> dict[int, int]:
        """Inputs off ``F`` making the output on ``S`` equal ``x``."""
        m, half = self.m, self.m // 2
        if len(x) != half or any(b not in (0, 1) for b in x):
            raise InvalidParameterError(f"x must be a bit string of length {half}")
        g = build_depth2_tree(m)
        out = {}
        for v in range(half + 1, m + 1):
            out[g.edge_id(0, v)] = 0
            for j in range(1, m + 1):
                out[g.edge_id(v, depth2_vertex(m, v, j))] = x[v - half - 1] * int(j <= v - half)
        return out

    def full_input(self, x: Sequence[int]) -> tuple[int, ...]:
        merged = dict(self.fixed)
        merged.update(self.completion(x))
        return tuple(merged[e] for e in range(len(merged)))


def counting_lower_bound_instance(m: int) -> CountingLowerBoundInstance:
    """``K = {0}``, ``S = {1..m/2}``; subtree ``u`` in ``S`` carries ``u`` ones so its summation is ``u``."""
    if m < 2 or m % 2:
        raise InvalidParameterError("m must be even and >= 2")
    g = build_depth2_tree(m)
    K, S = (0,), tuple(range(1, m // 2 + 1))
    F = light_cone_edges(g, K, S, 1)
    fixed = {}
    for u in S:
        fixed[g.edge_id(0, u)] = 0
        for j in range(1, m + 1):
            fixed[g.edge_id(u, depth2_vertex(m, u, j))] = int(j <= u)
    assert set(fixed) == set(F)
    return CountingLowerBoundInstance(m, K, S, F, fixed)


# -- duplicate detection on a star ----------------------------------------------------


def _duplicates(inputs: Sequence[int]) -> tuple[int, ...]:
    counts: dict[int, int] = {}
    for x in inputs:
        counts[x] = counts.get(x, 0) + 1
    leaves = tuple(int(counts[x] > 1) for x in inputs)
    return (int(any(leaves)),) + leaves


def large_alphabet_task_g(n: int, inputs: Sequence[int]) -> tuple[int, ...]:
    """Leaf ``v`` outputs 1 iff another edge carries the same symbol as ``{0,v}``; the hub outputs the OR.

    Symbols are in ``1..n``; input ``k`` belongs to edge ``{0, k+1}``.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    inputs = tuple(int(x) for x in inputs)
    if len(inputs) != n:
        raise InvalidParameterError(f"expected {n} inputs")
    if any(not 1 <= x <= n for x in inputs):
        raise InvalidParameterError(f"symbols must be in 1..{n}")
    return _duplicates(inputs)


def binary_star_task_g(n: int, inputs: Sequence[int]) -> tuple[int, ...]:
    """The same duplicate test with inputs restricted to bits."""
    return _duplicates(_binary_input(build_star(n), inputs))


def large_alphabet_memory(n: int) -> int:
    return max(1, math.ceil(math.log2(n + 1)))


def build_large_alphabet_edge_protocol(n: int) -> SymmetricEdgeProtocol:
    """Round 1 loads the symbol; round 2 flags symbols seen on another edge; vertices OR the flags.

    Every star edge is adjacent to every other, so the closed neighbourhood of
    an edge is the whole edge set.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    B = large_alphabet_memory(n)

    def rule(t, x, own, sides):
        if t == 1:
            return int_to_bits(x, B)
        same = sum(1 for side in sides for s in side if s == own) - 1
        return int_to_bits(int(same > 1), B)

    def aggregate(states):
        return int(any(bits_to_int(s) for s in states))

    return SymmetricEdgeProtocol(2, rule, aggregate, memory=B, name=f"large-alphabet[n={n}]")


def build_histogram_node_protocol(n: int) -> NodeProtocol:
    """Two-round node protocol for the binary duplicate test on a star.

    Round 1: the hub stores how many incident inputs are 1. Round 2: a leaf
    with input ``b`` has a duplicate iff at least two inputs equal ``b``; the
    hub reports whether either value occurs twice.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    g = build_star(n)
    B = large_alphabet_memory(n)

    def rule(t, v, states, inputs):
        if t == 1:
            if v == 0:
                return int_to_bits(sum(inputs.values()), B)
            return zeros(B)
        ones = bits_to_int(states[0])
        if v == 0:
            flag = ones >= 2 or n - ones >= 2
        else:
            mine = inputs[g.edge_id(0, v)]
            flag = (ones if mine else n - ones) >= 2
        return (int(flag),) + zeros(B - 1)

    return NodeProtocol(2, B, rule, name=f"histogram[n={n}]")


# -- mirrored pairs on the complete graph -------------------------------------------------


def _mirror(n: int, v: int) -> int:
    """0-based image of vertex ``v`` under ``i -> n+1-i`` on 1-based names."""
    return n - 1 - v


def _check_even(n: int) -> None:
    if n < 2 or n % 2:
        raise InvalidParameterError("n must be even and >= 2")


def first_half_edges(n: int) -> list[tuple[int, int]]:
    half = n // 2
    return [(a, b) for a in range(half) for b in range(a + 1, half)]


def disjointness_task_g(n: int, inputs: Sequence[int]) -> tuple[int, ...]:
    """Every vertex outputs 1 iff some first-half edge and its mirror image both carry a 1."""
    _check_even(n)
    g = build_complete(n)
    inputs = _binary_input(g, inputs)
    hit = any(
        inputs[g.edge_id(a, b)] and inputs[g.edge_id(_mirror(n, a), _mirror(n, b))]
        for a, b in first_half_edges(n)
    )
    return (int(hit),) * n


def disj(a: Sequence[int], b: Sequence[int]) -> int:
    """Two-party set disjointness: 1 iff no index has ``a_i = b_i = 1``."""
    if len(a) != len(b):
        raise InvalidParameterError("DISJ inputs must have equal length")
    return int(all(not (x and y) for x, y in zip(a, b)))


def disjointness_split(n: int, inputs: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Alice's and Bob's strings: first-half edges, and their mirrors in the same order."""
    _check_even(n)
    g = build_complete(n)
    X = tuple(inputs[g.edge_id(a, b)] for a, b in first_half_edges(n))
    Y = tuple(inputs[g.edge_id(_mirror(n, a), _mirror(n, b))] for a, b in first_half_edges(n))
    return X, Y


def build_disjointness_edge_protocol(n: int) -> EdgeProtocol:
    """Six rounds, one bit per edge.

    With ``{i, j}`` written so that ``i < j``: round 1 loads the input,
    rounds 2 and 3 move the mirrored input ``I({i', j'})`` onto ``{i, j}``
    in two hops through ``{i', j}`` and ``{i, j'}``, round 4 marks first-half
    edges whose own input and mirrored input are both 1, and rounds 5 and 6
    spread the mark to every edge by OR over the closed edge neighbourhood.
    Vertex ``v`` reads edge ``{v, 0}`` (vertex 0 reads ``{0, 1}``).
    """
    _check_even(n)
    g = build_complete(n)
    half = n // 2

    def rule(t, e, states, x):
        i, j = g.endpoints(e)
        if t == 1:
            return (x,)
        if t == 2:
            a = _mirror(n, i)
            return (0,) if a == j else states[g.edge_id(a, j)]
        if t == 3:
            b = _mirror(n, j)
            return (0,) if b == i else states[g.edge_id(i, b)]
        if t == 4:
            return (int(x == 1 and states[e][0] == 1 and j < half),)
        return (int(any(s[0] for s in states.values())),)

    def aggregate(v, states):
        return states[g.edge_id(v, 0 if v else 1)][0]

    return EdgeProtocol(6, 1, rule, aggregate, name=f"disjointness[n={n}]")
