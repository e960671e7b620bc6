"""Residual GCN forward passes over nodes and over edges, and the planted star dataset.

A layer updates ``h_v <- h_v + sigma(W @ mean(h_w for w adjacent to v, w != v))``.
The edge version is the same layer run on the line graph; both passes go
through :func:`_mean_neighbors` with neighbours in ascending id order, so they
agree bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import InvalidParameterError
from .graphs import Graph, build_star
from .rng import SeededStream

ACTIVATIONS = {
    "tanh": np.tanh,
    "relu": lambda z: np.maximum(z, 0.0),
    "identity": lambda z: z,
}

STAR_PRESETS = [(n, k) for n in (16, 32, 64) for k in (1, 3, 5)]


@dataclass(frozen=True)
class GcnStack:
    weights: tuple[np.ndarray, ...]
    sigma: str = "tanh"

    def __post_init__(self) -> None:
        if self.sigma not in ACTIVATIONS:
            raise InvalidParameterError(f"unknown activation {self.sigma!r}")
        ws = tuple(np.asarray(w, dtype=np.float64) for w in self.weights)
        if ws:
            d = ws[0].shape[0]
            for w in ws:
                if w.shape != (d, d):
                    raise InvalidParameterError("all weights must be square with the same width")
                if not np.all(np.isfinite(w)):
                    raise InvalidParameterError("weights must be finite")
        object.__setattr__(self, "weights", ws)

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def width(self) -> int | None:
        return self.weights[0].shape[0] if self.weights else None

    @classmethod
    def zeros(cls, depth: int, width: int, sigma: str = "tanh") -> "GcnStack":
        return cls(tuple(np.zeros((width, width)) for _ in range(depth)), sigma)

    @classmethod
    def random(cls, depth: int, width: int, stream: SeededStream, scale: float = 1.0, sigma: str = "tanh") -> "GcnStack":
        """Entries i.i.d. ``N(0, scale^2 / width)``, drawn row-major layer by layer."""
        std = scale / np.sqrt(width)
        ws = [np.array(stream.normals(width * width)).reshape(width, width) * std for _ in range(depth)]
        return cls(tuple(ws), sigma)

    def to_dict(self) -> dict[str, Any]:
        return {"sigma": self.sigma, "weights": [w.tolist() for w in self.weights]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GcnStack":
        return cls(tuple(np.array(w, dtype=np.float64) for w in data["weights"]), data.get("sigma", "tanh"))


def _mean_neighbors(h: np.ndarray, nbrs: Sequence[Sequence[int]]) -> np.ndarray:
    out = np.zeros_like(h)
    for v, ns in enumerate(nbrs):
        if ns:
            out[v] = h[list(ns)].mean(axis=0)
    return out


def _forward(nbrs: Sequence[Sequence[int]], stack: GcnStack, h0: Any) -> np.ndarray:
    h = np.array(h0, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != len(nbrs):
        raise InvalidParameterError(f"expected features of shape ({len(nbrs)}, d), got {h.shape}")
    if not np.all(np.isfinite(h)):
        raise InvalidParameterError("features must be finite")
    if stack.depth and stack.width != h.shape[1]:
        raise InvalidParameterError(f"feature width {h.shape[1]} does not match weights {stack.width}")
    sigma = ACTIVATIONS[stack.sigma]
    for w in stack.weights:
        m = _mean_neighbors(h, nbrs)
        h = h + sigma(m @ w.T)
    return h


def node_gcn_forward(g: Graph, stack: GcnStack, h0: Any) -> np.ndarray:
    nbrs = [tuple(w for w in g.vertex_neighbors(v) if w != v) for v in range(g.num_vertices)]
    return _forward(nbrs, stack, h0)


def edge_gcn_forward(g: Graph, stack: GcnStack, h0: Any) -> np.ndarray:
    """Same layers with processors on edges; ``h0`` row ``e`` belongs to edge id ``e``."""
    nbrs = [tuple(f for f in g.edge_neighbors(e) if f != e) for e in range(g.num_edges)]
    return _forward(nbrs, stack, h0)


def init_edge_features_from_nodes(g: Graph, node_features: Any) -> np.ndarray:
    """Row ``e = (u, v)`` with ``u < v`` is ``concat(x_u, x_v)``, so the order follows the canonical endpoints."""
    x = np.asarray(node_features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != g.num_vertices:
        raise InvalidParameterError("need one feature row per vertex")
    if not g.num_edges:
        return np.zeros((0, 2 * x.shape[1]))
    u = np.array([a for a, _ in g.edges])
    v = np.array([b for _, b in g.edges])
    return np.concatenate([x[u], x[v]], axis=1)


def rmse(predictions: Any, labels: Any) -> float:
    p = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if p.shape != y.shape:
        raise InvalidParameterError(f"shape mismatch {p.shape} vs {y.shape}")
    if p.size == 0:
        raise InvalidParameterError("rmse of empty arrays")
    return float(np.sqrt(np.mean((p - y) ** 2)))


def generate_star_dataset(
    n_leaves: int,
    depth: int,
    width: int = 10,
    n_samples: int = 100,
    seed: int = 0,
    weight_scale: float = 1.0,
) -> dict[str, Any]:
    """Leaf features ``x_i ~ N(0, I)`` on edge ``{0, i}``; labels are a planted edge GCN's outputs.

    Planted weights come from stream ``(seed, 0)``; sample ``s`` uses stream
    ``(seed, 1, s)``.
    """
    if n_leaves < 1 or depth < 0 or width < 1 or n_samples < 0:
        raise InvalidParameterError("need n_leaves >= 1, depth >= 0, width >= 1, n_samples >= 0")
    g = build_star(n_leaves)
    root = SeededStream(seed)
    stack = GcnStack.random(depth, width, root.child(0), weight_scale)
    samples = []
    for s in range(n_samples):
        x = np.array(root.child(1, s).normals(n_leaves * width)).reshape(n_leaves, width)
        y = edge_gcn_forward(g, stack, x)
        samples.append({"x": x.tolist(), "y": y.tolist()})
    return {
        "n_leaves": n_leaves,
        "planted": {
            "depth": depth,
            "width": width,
            "weight_scale": weight_scale,
            "weight_std": weight_scale / float(np.sqrt(width)),
            **stack.to_dict(),
        },
        "seed": seed,
        "samples": samples,
    }
