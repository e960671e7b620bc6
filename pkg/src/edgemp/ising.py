"""Ising models on trees: exact marginals, belief propagation, and the node-form dynamic program.

The model is ``p(x) ∝ exp(sum_{ij} J_ij x_i x_j + sum_i h_i x_i)`` over
``x in {-1, +1}^V``. Messages follow

    nu_{i->j} = tanh(h_i + sum_{k ~ i, k != j} atanh(tanh(J_ik) * nu_{k->i}))

and marginals are ``E[x_i] = tanh(h_i + sum_{k ~ i} atanh(tanh(J_ik) * nu_{k->i}))``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import CapExceededError, InvalidParameterError
from .graphs import Graph, build_binary_tree, build_path, diameter, is_tree, random_tree
from .rng import SeededStream

ATANH_CLAMP = 1.0 - 1e-12
BRUTE_FORCE_CAP = 20


@dataclass(frozen=True)
class IsingModel:
    graph: Graph
    J: tuple[float, ...]
    h: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.J) != self.graph.num_edges:
            raise InvalidParameterError("need one coupling per edge")
        if len(self.h) != self.graph.num_vertices:
            raise InvalidParameterError("need one field per vertex")
        if not all(math.isfinite(x) for x in (*self.J, *self.h)):
            raise InvalidParameterError("couplings and fields must be finite")

    @classmethod
    def uniform(cls, graph: Graph, h: Sequence[float], coupling: float = 1.0) -> "IsingModel":
        return cls(graph, (float(coupling),) * graph.num_edges, tuple(float(x) for x in h))

    def to_dict(self) -> dict[str, Any]:
        return {"graph": self.graph.to_dict(), "J": list(self.J), "h": list(self.h)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "IsingModel":
        g = Graph.from_dict(data["graph"])
        J = data.get("J", 1.0)
        if isinstance(J, (int, float)):
            J = [J] * g.num_edges
        return cls(g, tuple(float(x) for x in J), tuple(float(x) for x in data["h"]))


def _atanh(x: float) -> float:
    return math.atanh(min(ATANH_CLAMP, max(-ATANH_CLAMP, x)))


def exact_marginals_bruteforce(model: IsingModel, cap: int = BRUTE_FORCE_CAP) -> tuple[float, ...]:
    """``E[x_i]`` by summing over all ``2^n`` configurations (log-sum-exp normalized)."""
    g = model.graph
    n = g.num_vertices
    if n > cap:
        raise CapExceededError(f"{n} vertices exceeds brute-force cap {cap}")
    k = np.arange(1 << n, dtype=np.int64)
    X = 1 - 2 * ((k[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int8)
    logw = X @ np.asarray(model.h, dtype=np.float64)
    for (u, v), J in zip(g.edges, model.J):
        logw += J * (X[:, u] * X[:, v])
    w = np.exp(logw - logw.max())
    p = w / w.sum()
    return tuple(float(x) for x in p @ X)


@dataclass(frozen=True)
class BPMessages:
    """``values[(i, j)]`` is the message from ``i`` to ``j``."""

    values: dict[tuple[int, int], float]
    iterations: int

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.values[key]


def _coupling_lookup(model: IsingModel) -> dict[tuple[int, int], float]:
    out = {}
    for (u, v), J in zip(model.graph.edges, model.J):
        out[(u, v)] = out[(v, u)] = J
    return out


def default_iterations(g: Graph) -> int:
    """Twice the diameter, at least one."""
    return max(1, 2 * diameter(g))


def bp_run(model: IsingModel, num_iters: int | None = None) -> BPMessages:
    """Synchronous belief propagation from all-zero messages."""
    g = model.graph
    if num_iters is None:
        num_iters = default_iterations(g)
    if num_iters < 1:
        raise InvalidParameterError("num_iters must be >= 1")
    J = _coupling_lookup(model)
    tJ = {k: math.tanh(v) for k, v in J.items()}
    directed = [(u, v) for u, v in g.edges] + [(v, u) for u, v in g.edges]
    nu = {d: 0.0 for d in directed}
    for _ in range(num_iters):
        new = {}
        for i, j in directed:
            field = model.h[i]
            for k in g.vertex_neighbors(i):
                if k != i and k != j:
                    field += _atanh(tJ[(k, i)] * nu[(k, i)])
            new[(i, j)] = math.tanh(field)
        nu = new
    return BPMessages(nu, num_iters)


def marginals_from_messages(model: IsingModel, messages: BPMessages) -> tuple[float, ...]:
    g = model.graph
    J = _coupling_lookup(model)
    out = []
    for i in range(g.num_vertices):
        field = model.h[i]
        for k in g.vertex_neighbors(i):
            if k != i:
                field += _atanh(math.tanh(J[(k, i)]) * messages[(k, i)])
        out.append(math.tanh(field))
    return tuple(out)


def bp_marginals(model: IsingModel, num_iters: int | None = None) -> tuple[float, ...]:
    return marginals_from_messages(model, bp_run(model, num_iters))


def directed_node_dp(model: IsingModel, root: int = 0) -> tuple[float, ...]:
    """Marginals from two passes with per-node ``up`` and ``down`` values.

    ``up[v]`` is the message ``v`` sends to its parent, built from its field
    and its children's ``up`` values (leaves first). ``down[v]`` is the message
    the parent sends to ``v``, built from the parent's field, the parent's own
    ``down`` value and the ``up`` values of ``v``'s siblings (root first).
    """
    g = model.graph
    if not is_tree(g):
        raise InvalidParameterError("directed_node_dp needs a tree")
    g._check_vertex(root)
    J = _coupling_lookup(model)
    parent = {root: None}
    order = [root]
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in g.vertex_neighbors(v):
            if w != v and w not in parent:
                parent[w] = v
                order.append(w)
                queue.append(w)
    children: dict[int, list[int]] = {v: [] for v in order}
    for v in order[1:]:
        children[parent[v]].append(v)

    def pull(child: int, par: int, value: float) -> float:
        return _atanh(math.tanh(J[(child, par)]) * value)

    up: dict[int, float] = {}
    for v in reversed(order):
        up[v] = math.tanh(model.h[v] + sum(pull(c, v, up[c]) for c in children[v]))

    down: dict[int, float] = {}
    for p in order:
        base = model.h[p]
        if parent[p] is not None:
            base += pull(parent[p], p, down[p])
        for v in children[p]:
            down[v] = math.tanh(base + sum(pull(c, p, up[c]) for c in children[p] if c != v))

    out = []
    for v in range(g.num_vertices):
        field = model.h[v] + sum(pull(c, v, up[c]) for c in children[v])
        if parent[v] is not None:
            field += pull(parent[v], v, down[v])
        out.append(math.tanh(field))
    return tuple(out)


# -- datasets -----------------------------------------------------------------------

PRESETS: dict[str, dict[str, Any]] = {
    "binary31": {"kind": "binary_tree", "depth": 4},
    "path30": {"kind": "path", "n": 30},
    "random30": {"kind": "random_tree", "n": 30},
}


def build_topology(topology: dict[str, Any], seed: int) -> tuple[Graph, dict[str, Any]]:
    """Graph for a topology descriptor; random trees take ``tree_seed`` (default: ``seed``)."""
    kind = topology.get("kind")
    if kind == "binary_tree":
        return build_binary_tree(int(topology["depth"])), dict(topology)
    if kind == "path":
        return build_path(int(topology["n"])), dict(topology)
    if kind == "random_tree":
        desc = dict(topology)
        desc.setdefault("tree_seed", seed)
        return random_tree(int(desc["n"]), int(desc["tree_seed"])), desc
    raise InvalidParameterError(f"unknown topology {topology!r}")


def _label_sample(graph: Graph, h: tuple[float, ...], check: bool) -> tuple[float, ...]:
    model = IsingModel.uniform(graph, h)
    marg = bp_marginals(model)
    if check and graph.num_vertices <= BRUTE_FORCE_CAP:
        exact = exact_marginals_bruteforce(model)
        err = max(abs(a - b) for a, b in zip(marg, exact))
        if err > 1e-9:
            raise ArithmeticError(f"BP disagrees with brute force by {err:.3g}")
    return marg


def generate_ising_dataset(
    topology: dict[str, Any] | str,
    n_samples: int,
    seed: int,
    *,
    check_bruteforce: bool = True,
) -> dict[str, Any]:
    """Unit couplings, standard-Gaussian fields, exact marginal labels.

    Sample ``s`` draws its fields from the stream ``(seed, s)``, so samples are
    independent of how many others are generated.
    """
    if isinstance(topology, str):
        if topology not in PRESETS:
            raise InvalidParameterError(f"unknown preset {topology!r}")
        topology = PRESETS[topology]
    if n_samples < 0:
        raise InvalidParameterError("n_samples must be non-negative")
    graph, desc = build_topology(topology, seed)
    if not is_tree(graph):
        raise InvalidParameterError("Ising datasets are defined on trees")
    root = SeededStream(seed)
    samples = []
    for s in range(n_samples):
        h = tuple(root.child(s).normals(graph.num_vertices))
        samples.append({"h": list(h), "marginals": list(_label_sample(graph, h, check_bruteforce))})
    return {
        "topology": desc,
        "graph": graph.to_dict(),
        "coupling": 1.0,
        "seed": seed,
        "samples": samples,
    }
