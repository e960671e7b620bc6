"""MAP evaluation for pairwise models over the four-potential class on hub-path graphs.

Potential codes (2 bits, big-endian when packed into states)::

    0  ->  1[x_a != x_b]
    1  ->  1[x_a != 1 or x_b != 1]     (zero only when both are 1)
    2  ->  1[x_a != 0 or x_b != 0]     (zero only when both are 0)
    3  ->  0

An assignment minimizing the summed potentials is a MAP configuration. All
evaluators here return the lexicographically smallest minimizer, with vertex 0
as the most significant position.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import CapExceededError, InvalidParameterError
from .graphs import Graph, build_hub_path_graph, hub_path_vertex, light_cone_edges
from .protocols import EdgeProtocol, zeros

NEQ, BOTH_ONE, BOTH_ZERO, ZERO = 0, 1, 2, 3

#: POTENTIALS[code][a][b]
POTENTIALS = np.array(
    [
        [[0, 1], [1, 0]],
        [[1, 1], [1, 0]],
        [[0, 1], [1, 1]],
        [[0, 0], [0, 0]],
    ],
    dtype=np.int64,
)

DEFAULT_BRUTE_FORCE_CAP = 24


def symbol_bits(code: int) -> tuple[int, int]:
    return (code >> 1) & 1, code & 1


def bits_symbol(bits: Sequence[int]) -> int:
    return (bits[0] << 1) | bits[1]


def _check_symbols(g: Graph, symbols: Sequence[int]) -> tuple[int, ...]:
    symbols = tuple(int(s) for s in symbols)
    if len(symbols) != g.num_edges:
        raise InvalidParameterError(f"expected {g.num_edges} potential symbols, got {len(symbols)}")
    if any(s not in (0, 1, 2, 3) for s in symbols):
        raise InvalidParameterError("potential symbols must be in {0,1,2,3}")
    return symbols


def energy(g: Graph, symbols: Sequence[int], x: Sequence[int]) -> int:
    """Sum of edge potentials at assignment ``x``."""
    symbols = _check_symbols(g, symbols)
    if len(x) != g.num_vertices:
        raise InvalidParameterError(f"expected {g.num_vertices} vertex values, got {len(x)}")
    return int(sum(POTENTIALS[s, x[u], x[v]] for s, (u, v) in zip(symbols, g.edges)))


@lru_cache(maxsize=8)
def _assignment_block(n: int, start: int, stop: int) -> np.ndarray:
    k = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((k[:, None] >> shifts[None, :]) & 1).astype(np.intp)


def brute_force_map(
    g: Graph, symbols: Sequence[int], *, cap: int = DEFAULT_BRUTE_FORCE_CAP, chunk: int = 1 << 18
) -> tuple[int, ...]:
    """Lexicographically smallest minimizer by exhaustive enumeration of ``{0,1}^V``."""
    symbols = _check_symbols(g, symbols)
    n = g.num_vertices
    if n > cap:
        raise CapExceededError(f"{n} vertices exceeds brute-force cap {cap}")
    edges = np.array(g.edges, dtype=np.intp).reshape(-1, 2)
    sym = np.array(symbols, dtype=np.intp)
    best_val, best_idx = None, 0
    total = 1 << n
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        X = _assignment_block(n, start, stop)
        e = np.zeros(stop - start, dtype=np.int64)
        for k in range(len(sym)):
            e += POTENTIALS[sym[k]][X[:, edges[k, 0]], X[:, edges[k, 1]]]
        i = int(np.argmin(e))
        if best_val is None or e[i] < best_val:
            best_val, best_idx = int(e[i]), start + i
    return tuple((best_idx >> (n - 1 - v)) & 1 for v in range(n))


# -- hub-path dynamic program -------------------------------------------------


@dataclass(frozen=True)
class HubPathLayout:
    """Edge ids of a hub-path graph: ``hub[j][i]`` is ``{0,(i,j)}``, ``path[j][i]`` is ``{(i,j),(i+1,j)}`` (0-based ``i, j``)."""

    m: int
    graph: Graph
    hub: tuple[tuple[int, ...], ...]
    path: tuple[tuple[int, ...], ...]
    vertex: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=32)
def hub_path_layout(m: int) -> HubPathLayout:
    g = build_hub_path_graph(m)
    vertex = tuple(tuple(hub_path_vertex(m, i, j) for i in range(1, m + 1)) for j in range(1, m + 1))
    hub = tuple(tuple(g.edge_id(0, v) for v in row) for row in vertex)
    path = tuple(tuple(g.edge_id(row[i], row[i + 1]) for i in range(m - 1)) for row in vertex)
    return HubPathLayout(m, g, hub, path, vertex)


def _check_hub_path(m: int, g: Graph | None) -> HubPathLayout:
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    layout = hub_path_layout(m)
    if g is not None and g != layout.graph:
        raise InvalidParameterError("graph is not the hub-path graph for this m")
    return layout


def dp_map_hub_path(m: int, symbols: Sequence[int], g: Graph | None = None) -> tuple[int, ...]:
    """Exact MAP on the hub-path graph in time linear in the number of edges.

    For each hub value ``c0`` the paths decouple. Each path is scanned from
    its far end, accumulating ``cost[i][c]``, the least cost of the path
    suffix starting at position ``i`` with ``x_i = c`` (hub edges of the suffix
    included). A scan from the near end then fixes values greedily, preferring
    0 on ties, which yields the lexicographically smallest minimizer because
    each path's vertices have consecutive ids in path order.
    """
    layout = _check_hub_path(m, g)
    symbols = _check_symbols(layout.graph, symbols)
    P = POTENTIALS
    best_total, best_x = None, None
    for c0 in (0, 1):
        total = 0
        x = [c0] + [0] * (m * m)
        for j in range(m):
            hub, path, verts = layout.hub[j], layout.path[j], layout.vertex[j]
            cost = [[0, 0] for _ in range(m)]
            for c in (0, 1):
                cost[m - 1][c] = P[symbols[hub[m - 1]], c0, c]
            for i in range(m - 2, -1, -1):
                ph, pp = P[symbols[hub[i]]], P[symbols[path[i]]]
                nxt = cost[i + 1]
                for c in (0, 1):
                    cost[i][c] = ph[c0, c] + min(pp[c, 0] + nxt[0], pp[c, 1] + nxt[1])
            c = 0 if cost[0][0] <= cost[0][1] else 1
            total += cost[0][c]
            x[verts[0]] = c
            for i in range(1, m):
                pp = P[symbols[path[i - 1]]]
                c = 0 if pp[c, 0] + cost[i][0] <= pp[c, 1] + cost[i][1] else 1
                x[verts[i]] = c
        if best_total is None or total < best_total:
            best_total, best_x = total, x
    return tuple(int(v) for v in best_x)


def dp_map_hub_path_batch(m: int, symbols: np.ndarray) -> np.ndarray:
    """Vectorized :func:`dp_map_hub_path` over rows of an ``(N, |E|)`` symbol array."""
    layout = _check_hub_path(m, None)
    S = np.asarray(symbols, dtype=np.intp)
    if S.ndim != 2 or S.shape[1] != layout.graph.num_edges:
        raise InvalidParameterError("symbols must have shape (N, num_edges)")
    N = S.shape[0]
    P = POTENTIALS
    rows = np.arange(N)
    totals = []
    xs = []
    for c0 in (0, 1):
        total = np.zeros(N, dtype=np.int64)
        x = np.zeros((N, m * m + 1), dtype=np.int64)
        x[:, 0] = c0
        for j in range(m):
            hub, path, verts = layout.hub[j], layout.path[j], layout.vertex[j]
            cost = np.zeros((m, N, 2), dtype=np.int64)
            cost[m - 1] = P[S[:, hub[m - 1]], c0, :]
            for i in range(m - 2, -1, -1):
                pp = P[S[:, path[i]]]  # (N, 2, 2)
                via = pp + cost[i + 1][:, None, :]
                cost[i] = P[S[:, hub[i]], c0, :] + via.min(axis=2)
            c = (cost[0][:, 1] < cost[0][:, 0]).astype(np.int64)
            total += cost[0][rows, c]
            x[:, verts[0]] = c
            for i in range(1, m):
                pp = P[S[:, path[i - 1]]]
                opt = pp[rows, c, :] + cost[i]
                c = (opt[:, 1] < opt[:, 0]).astype(np.int64)
                x[:, verts[i]] = c
        totals.append(total)
        xs.append(x)
    pick_one = totals[1] < totals[0]
    return np.where(pick_one[:, None], xs[1], xs[0])


# -- the 3-round, 4-bit edge protocol ---------------------------------------------


def build_map_edge_protocol(m: int) -> EdgeProtocol:
    """Edge protocol with 3 rounds and 4-bit states whose vertex outputs equal :func:`dp_map_hub_path`.

    Round 1 every edge loads its own symbol into bits 0-1. Round 2 each hub
    edge ``{0,(i,j)}`` packs (symbol of ``{(i,j),(i+1,j)}``, own symbol); when
    ``i = m`` there is no such path edge and the first half stays zero. Round 3
    each hub edge sees every hub edge, rebuilds the full input, solves it and
    stores ``(x_0, 0, x_(i,j), 0)``. Path edges are zero in rounds 2 and 3.
    """
    if m < 2:
        raise InvalidParameterError("m must be >= 2")
    layout = hub_path_layout(m)
    g = layout.graph
    hub_pos = {}
    for j in range(m):
        for i in range(m):
            hub_pos[layout.hub[j][i]] = (i, j)
    num_edges = g.num_edges

    def rebuild(states) -> list[int]:
        J = [0] * num_edges
        for e, (i, j) in hub_pos.items():
            s = states[e]
            J[e] = bits_symbol(s[2:4])
            if i < m - 1:
                J[layout.path[j][i]] = bits_symbol(s[0:2])
        return J

    def rule(t, e, states, x):
        if t == 1:
            return symbol_bits(x) + (0, 0)
        if e not in hub_pos:
            return zeros(4)
        i, j = hub_pos[e]
        if t == 2:
            path_half = states[layout.path[j][i]][0:2] if i < m - 1 else (0, 0)
            return tuple(path_half) + tuple(states[e][0:2])
        sol = dp_map_hub_path(m, rebuild(states))
        return (sol[0], 0, sol[layout.vertex[j][i]], 0)

    first_hub = layout.hub[0][0]

    def aggregate(v, states):
        if v == 0:
            return states[first_hub][0]
        return states[g.edge_id(0, v)][2]

    return EdgeProtocol(3, 4, rule, aggregate, name=f"map-hub-path[m={m}]")


# -- lower-bound instance --------------------------------------------------------


@dataclass(frozen=True)
class MapLowerBoundInstance:
    m: int
    T: int
    K: tuple[int, ...]
    S: tuple[int, ...]
    F: tuple[int, ...]
    fixed: dict[int, int]  # edge id -> symbol on F

    def completion(self, y: Sequence[int]) -> dict[int, int]:
        """Symbols on the complement of F forcing the MAP value on path ``j`` to ``y[j]``."""
        m = self.m
        if len(y) != m or any(b not in (0, 1) for b in y):
            raise InvalidParameterError(f"y must be a bit string of length {m}")
        layout = hub_path_layout(m)
        F = set(self.F)
        out = {e: (ZERO if e in _hub_edges(layout) else NEQ) for e in range(layout.graph.num_edges) if e not in F}
        pins = [layout.path[j][m - 2] for j in range(m)]
        if not F.intersection(pins):
            for j, e in enumerate(pins):
                out[e] = BOTH_ONE if y[j] else BOTH_ZERO
            return out
        far_hubs = [layout.hub[j][m - 1] for j in range(m)]
        if F.intersection(far_hubs):
            raise InvalidParameterError(f"T={self.T} is too large for a pinning completion at m={m}")
        # Pin through the hub. No symbol forces disagreement, so paths with
        # y_j = 0 are left unconstrained and the tie-break settles them at 0;
        # any y_j = 1 forces x_0 = 1 and then x_(m,j) = 1 through BOTH_ONE.
        for j, e in enumerate(far_hubs):
            out[e] = BOTH_ONE if y[j] else ZERO
        return out

    def full_input(self, y: Sequence[int]) -> tuple[int, ...]:
        merged = dict(self.fixed)
        merged.update(self.completion(y))
        return tuple(merged[e] for e in range(len(merged)))


def _hub_edges(layout: HubPathLayout) -> frozenset[int]:
    return frozenset(e for row in layout.hub for e in row)


def build_proof_lower_bound_instance(m: int, T: int = 1) -> MapLowerBoundInstance:
    """Bottleneck ``K = {0}``, left path ends ``S``, and the fixed symbols on the light cone ``F``.

    On ``F`` hub edges get the zero potential and path edges the disagreement
    indicator. :meth:`MapLowerBoundInstance.completion` pins each path's far
    end; when ``T = m - 1`` the last path edge lies inside ``F`` and the pin
    is routed through the far hub edges and relies on the lexicographic tie-break.
    """
    if m < 2:
        raise InvalidParameterError("m must be >= 2")
    layout = hub_path_layout(m)
    g = layout.graph
    K = (0,)
    S = tuple(layout.vertex[j][0] for j in range(m))
    F = light_cone_edges(g, K, S, T)
    hubs = _hub_edges(layout)
    fixed = {e: (ZERO if e in hubs else NEQ) for e in F}
    inst = MapLowerBoundInstance(m, T, K, S, F, fixed)
    inst.completion((0,) * m)  # validates T
    return inst
