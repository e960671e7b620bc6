"""Undirected graphs with canonical edge ids, and the graph families used by the protocols.

Edges are stored as sorted ``(u, v)`` pairs with ``u < v``; an edge's id is its
position in the lexicographically sorted edge list. Self-loops are never
stored. Adjacency queries are reflexive: a vertex belongs to its own
neighbourhood and an edge belongs to its own edge neighbourhood.
"""
from __future__ import annotations

import heapq
from collections import deque
from typing import Any, Iterable, Sequence

from .errors import InvalidParameterError
from .rng import SeededStream

FAMILIES = ("hub_path", "depth2_tree", "star", "complete", "random_tree", "custom")


class Graph:
    """Immutable simple undirected graph on vertices ``0..num_vertices-1``."""

    __slots__ = (
        "num_vertices",
        "edges",
        "labels",
        "family",
        "params",
        "seed",
        "_edge_index",
        "_vertex_nbrs",
        "_incident",
        "_edge_nbrs",
    )

    def __init__(
        self,
        num_vertices: int,
        edges: Iterable[Sequence[int]],
        *,
        labels: Sequence[str] | None = None,
        family: str = "custom",
        params: dict[str, Any] | None = None,
        seed: int | None = None,
    ) -> None:
        if num_vertices < 0:
            raise InvalidParameterError("num_vertices must be non-negative")
        if family not in FAMILIES:
            raise InvalidParameterError(f"unknown graph family {family!r}")
        normalized = set()
        for pair in edges:
            u, v = (int(x) for x in pair)
            if u == v:
                raise InvalidParameterError(f"self-loop on vertex {u} cannot be stored")
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise InvalidParameterError(f"edge {(u, v)} has an endpoint out of range")
            key = (u, v) if u < v else (v, u)
            if key in normalized:
                raise InvalidParameterError(f"duplicate edge {key}")
            normalized.add(key)
        if labels is not None and len(labels) != num_vertices:
            raise InvalidParameterError("labels must have one entry per vertex")

        self.num_vertices = int(num_vertices)
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(normalized))
        self.labels = tuple(labels) if labels is not None else None
        self.family = family
        self.params = dict(params or {})
        self.seed = seed

        self._edge_index = {e: i for i, e in enumerate(self.edges)}
        nbrs: list[list[int]] = [[v] for v in range(self.num_vertices)]
        incident: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for eid, (u, v) in enumerate(self.edges):
            nbrs[u].append(v)
            nbrs[v].append(u)
            incident[u].append(eid)
            incident[v].append(eid)
        self._vertex_nbrs = tuple(tuple(sorted(n)) for n in nbrs)
        self._incident = tuple(tuple(i) for i in incident)
        self._edge_nbrs = tuple(
            tuple(sorted(set(self._incident[u]) | set(self._incident[v])))
            for u, v in self.edges
        )

    # -- basic queries -------------------------------------------------
    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_id(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self._edge_index[key]
        except KeyError:
            raise InvalidParameterError(f"{key} is not an edge") from None

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_index

    def endpoints(self, e: int) -> tuple[int, int]:
        self._check_edge(e)
        return self.edges[e]

    def vertex_neighbors(self, v: int) -> tuple[int, ...]:
        """N_G(v), including ``v`` itself."""
        self._check_vertex(v)
        return self._vertex_nbrs[v]

    def incident_edges(self, v: int) -> tuple[int, ...]:
        """M_G(v): ids of the edges touching ``v``, ascending."""
        self._check_vertex(v)
        return self._incident[v]

    def edge_neighbors(self, e: int) -> tuple[int, ...]:
        """M_G(e): ids of edges sharing an endpoint with ``e``, including ``e``."""
        self._check_edge(e)
        return self._edge_nbrs[e]

    def degree(self, v: int) -> int:
        return len(self.incident_edges(v))

    @property
    def max_degree(self) -> int:
        return max((len(i) for i in self._incident), default=0)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.num_vertices:
            raise InvalidParameterError(f"vertex {v} out of range")

    def _check_edge(self, e: int) -> None:
        if not 0 <= e < len(self.edges):
            raise InvalidParameterError(f"edge id {e} out of range")

    # -- comparison and serialization -----------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.num_vertices == other.num_vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.num_vertices, self.edges))

    def __repr__(self) -> str:
        return f"Graph(family={self.family!r}, n={self.num_vertices}, m={self.num_edges})"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "num_vertices": self.num_vertices,
            "edges": [list(e) for e in self.edges],
            "family": self.family,
            "params": self.params,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Graph":
        return cls(
            data["num_vertices"],
            data["edges"],
            labels=data.get("labels"),
            family=data.get("family", "custom"),
            params=data.get("params"),
            seed=data.get("seed"),
        )

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.num_vertices))
        g.add_edges_from(self.edges)
        return g


# -- families -----------------------------------------------------------


def hub_path_vertex(m: int, i: int, j: int) -> int:
    """Id of vertex ``(i, j)`` (position ``i`` on path ``j``, both 1-based) in the hub-path graph."""
    return 1 + (j - 1) * m + (i - 1)


def build_hub_path_graph(m: int) -> Graph:
    """Hub vertex 0 joined to every vertex of ``m`` disjoint paths with ``m`` vertices each."""
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    edges = []
    for j in range(1, m + 1):
        for i in range(1, m + 1):
            edges.append((0, hub_path_vertex(m, i, j)))
            if i < m:
                edges.append((hub_path_vertex(m, i, j), hub_path_vertex(m, i + 1, j)))
    return Graph(m * m + 1, edges, family="hub_path", params={"m": m})


def depth2_vertex(m: int, u: int, j: int | None = None) -> int:
    """Id of middle vertex ``u`` or of leaf ``(u, j)`` (1-based) in the depth-two tree."""
    if j is None:
        return u
    return m + (u - 1) * m + j


def build_depth2_tree(m: int) -> Graph:
    """Root 0, middle vertices ``1..m``, and ``m`` leaves below each middle vertex."""
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    edges = []
    for u in range(1, m + 1):
        edges.append((0, u))
        for j in range(1, m + 1):
            edges.append((u, depth2_vertex(m, u, j)))
    return Graph(1 + m + m * m, edges, family="depth2_tree", params={"m": m})


def build_star(n: int) -> Graph:
    """Centre 0 with leaves ``1..n``."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    return Graph(n + 1, [(0, i) for i in range(1, n + 1)], family="star", params={"n": n})


def build_complete(n: int) -> Graph:
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return Graph(n, edges, family="complete", params={"n": n})


def prufer_decode(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Edges of the labelled tree on ``n`` vertices encoded by Prüfer sequence ``seq``."""
    if len(seq) != n - 2:
        raise InvalidParameterError("Prüfer sequence must have length n - 2")
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def random_tree(n: int, seed: int) -> Graph:
    """Uniformly random labelled tree on ``n`` vertices, via Prüfer decoding."""
    if n < 2:
        raise InvalidParameterError("n must be >= 2")
    stream = SeededStream(seed)
    seq = [stream.randbelow(n) for _ in range(n - 2)]
    return Graph(n, prufer_decode(seq, n), family="random_tree", params={"n": n}, seed=seed)


def build_path(n: int) -> Graph:
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)], params={"path": n})


def build_binary_tree(depth: int) -> Graph:
    """Complete binary tree with ``2**(depth+1) - 1`` vertices; children of ``v`` are ``2v+1, 2v+2``."""
    if depth < 0:
        raise InvalidParameterError("depth must be >= 0")
    n = 2 ** (depth + 1) - 1
    return Graph(n, [((v - 1) // 2, v) for v in range(1, n)], params={"binary_tree": depth})


def line_graph(g: Graph) -> Graph:
    """Graph on the edge ids of ``g``; two ids are adjacent iff the edges share an endpoint."""
    edges = []
    for e in range(g.num_edges):
        for f in g.edge_neighbors(e):
            if f > e:
                edges.append((e, f))
    return Graph(g.num_edges, edges, params={"line_graph_of": g.to_dict()})


# -- neighbourhoods ------------------------------------------------------


def neighborhood(g: Graph, element: int, *, of: str = "vertex", returns: str = "vertices") -> tuple[int, ...]:
    """Reflexive neighbourhood query.

    ``of`` says whether ``element`` is a vertex or an edge id; ``returns``
    selects N_G (``"vertices"``) or M_G (``"edges"``).
    """
    if of == "vertex":
        return g.vertex_neighbors(element) if returns == "vertices" else g.incident_edges(element)
    if of == "edge":
        return tuple(g.endpoints(element)) if returns == "vertices" else g.edge_neighbors(element)
    raise InvalidParameterError(f"unknown element kind {of!r}")


def _as_vertex_set(g: Graph, xs: Iterable[int]) -> frozenset[int]:
    out = frozenset(int(x) for x in xs)
    for v in out:
        g._check_vertex(v)
    return out


def restricted_ball(g: Graph, K: Iterable[int], S: Iterable[int], r: int) -> tuple[int, ...]:
    """Vertices within ``r`` hops of ``S`` in the subgraph induced on ``V \\ K``."""
    K, S = _as_vertex_set(g, K), _as_vertex_set(g, S)
    if K & S:
        raise InvalidParameterError("K and S must be disjoint")
    if r < 0:
        raise InvalidParameterError("radius must be non-negative")
    dist = {s: 0 for s in S}
    queue = deque(S)
    while queue:
        v = queue.popleft()
        if dist[v] == r:
            continue
        for w in g.vertex_neighbors(v):
            if w not in K and w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return tuple(sorted(dist))


def incident_edge_set(g: Graph, vertices: Iterable[int]) -> tuple[int, ...]:
    """M_G of a vertex set: every edge touching at least one of ``vertices``."""
    out: set[int] = set()
    for v in vertices:
        out.update(g.incident_edges(v))
    return tuple(sorted(out))


def light_cone_edges(g: Graph, K: Iterable[int], S: Iterable[int], T: int) -> tuple[int, ...]:
    """The edge set whose inputs can reach ``S`` within ``T`` rounds without passing through ``K``."""
    if T < 1:
        raise InvalidParameterError("T must be >= 1")
    return incident_edge_set(g, restricted_ball(g, K, S, T - 1))


def is_tree(g: Graph) -> bool:
    if g.num_vertices == 0 or g.num_edges != g.num_vertices - 1:
        return False
    return len(restricted_ball(g, (), (0,), g.num_vertices)) == g.num_vertices


def diameter(g: Graph) -> int:
    """Longest shortest-path length (BFS from every vertex); graph must be connected."""
    best = 0
    for s in range(g.num_vertices):
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.vertex_neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        if len(dist) != g.num_vertices:
            raise InvalidParameterError("graph is disconnected")
        best = max(best, max(dist.values()))
    return best
