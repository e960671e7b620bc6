"""Executable semantics for node and edge message-passing protocols.

Processors hold states. In *bounded* mode (``memory=B``) a state is a tuple of
exactly ``B`` bits and every round starts from the all-zeros state. In
*unbounded* mode (``memory=None``) a state is any structured value
(see :mod:`edgemp.structured`) and the initial state is the atom ``0``.

Rounds are synchronous: round ``t`` states are computed only from round
``t-1`` states and the inputs, which live on edges.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .errors import InvalidProtocolError, MemoryBudgetError
from .graphs import Graph
from .rng import SeededStream
from .structured import Multiset, size_bits, to_json

Bits = tuple  # tuple[int, ...] of 0/1

NodeRule = Callable[[int, int, Mapping[int, Any], Mapping[int, Any]], Any]
EdgeRule = Callable[[int, int, Mapping[int, Any], Any], Any]
EdgeAggregate = Callable[[int, Mapping[int, Any]], int]


# -- bit helpers -----------------------------------------------------------


def zeros(width: int) -> Bits:
    return (0,) * width


def int_to_bits(value: int, width: int) -> Bits:
    """Big-endian ``width``-bit encoding of a non-negative integer."""
    if value < 0 or value >= (1 << width):
        raise ValueError(f"{value} does not fit in {width} bits")
    return tuple((value >> (width - 1 - k)) & 1 for k in range(width))


def bits_to_int(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


def bits_to_hex(bits: Sequence[int]) -> str:
    """Hex dump, left-padded to whole nibbles; ``len(bits)`` is not recoverable from it alone."""
    if not bits:
        return ""
    return format(bits_to_int(bits), "0{}x".format((len(bits) + 3) // 4))


# -- protocol types --------------------------------------------------------


@dataclass(frozen=True)
class NodeProtocol:
    """``rule(t, v, states, inputs)`` returns P_t(v).

    ``states`` maps every ``v' in N_G(v)`` (including ``v``) to its round
    ``t-1`` state; ``inputs`` maps every edge id in ``M_G(v)`` to its input
    symbol. The vertex output is the first bit of the final state.
    """

    rounds: int
    memory: int | None
    rule: NodeRule
    name: str = "node-protocol"
    readout: Callable[[Any], int] | None = None


@dataclass(frozen=True)
class EdgeProtocol:
    """``rule(t, e, states, x)`` returns P_t(e); ``aggregate(v, states)`` returns vertex ``v``'s output.

    ``states`` maps every edge in ``M_G(e)`` (for rules) or ``M_G(v)`` (for
    aggregation) to its state; ``x`` is the input on ``e`` itself.
    """

    rounds: int
    memory: int | None
    rule: EdgeRule
    aggregate: EdgeAggregate
    name: str = "edge-protocol"


@dataclass(frozen=True)
class SymmetricNodeProtocol:
    """``rule(t, own, nbrs)`` with ``nbrs`` the multiset of ``(state, input on the connecting edge)`` pairs.

    Neighbours are the proper neighbours of the vertex; the vertex's own state
    is passed separately. ``readout`` maps a final state to the output bit
    (default: first bit of a bounded state).
    """

    rounds: int
    rule: Callable[[int, Any, Multiset], Any]
    memory: int | None = None
    readout: Callable[[Any], int] | None = None
    name: str = "symmetric-node-protocol"


@dataclass(frozen=True)
class SymmetricEdgeProtocol:
    """``rule(t, x, own, sides)`` and ``aggregate(states)``.

    ``sides`` is a two-element multiset holding, for each endpoint of the
    edge, the multiset of states of the edges incident to that endpoint (the
    edge itself appears in both). ``aggregate`` receives the multiset of
    states of the edges incident to a vertex.
    """

    rounds: int
    rule: Callable[[int, Any, Any, Multiset], Any]
    aggregate: Callable[[Multiset], int]
    memory: int | None = None
    name: str = "symmetric-edge-protocol"


AnyProtocol = NodeProtocol | EdgeProtocol | SymmetricNodeProtocol | SymmetricEdgeProtocol


@dataclass
class ExecutionTrace:
    """States of every processor after every round, plus vertex outputs.

    ``states[t][p]`` is the state of processor ``p`` (a vertex for node
    protocols, an edge id for edge protocols) after round ``t``; ``states[0]``
    is the initial state.
    """

    kind: str
    memory: int | None
    states: list[tuple[Any, ...]]
    outputs: tuple[int, ...]
    max_state_bits: int
    name: str = ""

    @property
    def rounds(self) -> int:
        return len(self.states) - 1

    def to_dict(self) -> dict[str, Any]:
        if self.memory is not None:
            dump = [[bits_to_hex(s) for s in rnd] for rnd in self.states]
        else:
            dump = [[to_json(s) for s in rnd] for rnd in self.states]
        return {
            "protocol": self.name,
            "kind": self.kind,
            "memory": self.memory,
            "rounds": self.rounds,
            "states": dump,
            "outputs": list(self.outputs),
            "max_state_bits": self.max_state_bits,
        }


# -- runners ---------------------------------------------------------------


def _initial(memory: int | None) -> Any:
    return zeros(memory) if memory is not None else 0


def _check_state(state: Any, memory: int | None, where: str) -> int:
    """Validate one state and return its size in bits."""
    if memory is None:
        return size_bits(state)
    if not isinstance(state, tuple) or any(b not in (0, 1) for b in state):
        raise InvalidProtocolError(f"{where}: bounded state must be a tuple of bits, got {state!r}")
    if len(state) > memory:
        raise MemoryBudgetError(f"{where}: state has {len(state)} bits, budget is {memory}")
    if len(state) < memory:
        raise InvalidProtocolError(f"{where}: state has {len(state)} bits, expected exactly {memory}")
    return memory


def _check_input(g: Graph, inputs: Sequence[Any]) -> tuple[Any, ...]:
    inputs = tuple(inputs)
    if len(inputs) != g.num_edges:
        raise InvalidProtocolError(f"input has {len(inputs)} symbols, graph has {g.num_edges} edges")
    return inputs


def _check_rounds(rounds: int) -> None:
    if rounds < 1:
        raise InvalidProtocolError("a protocol needs at least one round")


def _bit(value: Any, where: str) -> int:
    if value not in (0, 1):
        raise InvalidProtocolError(f"{where}: output must be a bit, got {value!r}")
    return int(value)


def run_node_protocol(p: NodeProtocol, g: Graph, inputs: Sequence[Any]) -> ExecutionTrace:
    _check_rounds(p.rounds)
    inputs = _check_input(g, inputs)
    prev = tuple(_initial(p.memory) for _ in range(g.num_vertices))
    history = [prev]
    peak = 0
    for t in range(1, p.rounds + 1):
        cur = []
        for v in range(g.num_vertices):
            states = {w: prev[w] for w in g.vertex_neighbors(v)}
            local = {e: inputs[e] for e in g.incident_edges(v)}
            s = p.rule(t, v, states, local)
            peak = max(peak, _check_state(s, p.memory, f"{p.name} round {t} vertex {v}"))
            cur.append(s)
        prev = tuple(cur)
        history.append(prev)
    if p.readout is not None:
        outputs = tuple(_bit(p.readout(s), f"vertex {v}") for v, s in enumerate(prev))
    else:
        outputs = tuple(_bit(s[0], f"vertex {v}") for v, s in enumerate(prev))
    return ExecutionTrace("node", p.memory, history, outputs, peak, p.name)


def run_edge_protocol(p: EdgeProtocol, g: Graph, inputs: Sequence[Any]) -> ExecutionTrace:
    _check_rounds(p.rounds)
    inputs = _check_input(g, inputs)
    prev = tuple(_initial(p.memory) for _ in range(g.num_edges))
    history = [prev]
    peak = 0
    for t in range(1, p.rounds + 1):
        cur = []
        for e in range(g.num_edges):
            states = {f: prev[f] for f in g.edge_neighbors(e)}
            s = p.rule(t, e, states, inputs[e])
            peak = max(peak, _check_state(s, p.memory, f"{p.name} round {t} edge {e}"))
            cur.append(s)
        prev = tuple(cur)
        history.append(prev)
    outputs = tuple(
        _bit(p.aggregate(v, {e: prev[e] for e in g.incident_edges(v)}), f"vertex {v}")
        for v in range(g.num_vertices)
    )
    return ExecutionTrace("edge", p.memory, history, outputs, peak, p.name)


def symmetric_node_as_plain(p: SymmetricNodeProtocol, g: Graph) -> NodeProtocol:
    """The plain node protocol whose rules call ``p.rule`` on canonical multisets."""

    def rule(t, v, states, local):
        nbrs = Multiset((states[w], local[g.edge_id(v, w)]) for w in g.vertex_neighbors(v) if w != v)
        return p.rule(t, states[v], nbrs)

    readout = p.readout
    if readout is None and p.memory is None:
        raise InvalidProtocolError("unbounded symmetric node protocols need an explicit readout")
    return NodeProtocol(p.rounds, p.memory, rule, name=p.name, readout=readout)


def symmetric_edge_as_plain(p: SymmetricEdgeProtocol, g: Graph) -> EdgeProtocol:
    """The plain edge protocol whose rules call ``p.rule`` on canonical nested multisets."""

    def rule(t, e, states, x):
        u, v = g.endpoints(e)
        sides = Multiset(
            (
                Multiset(states[f] for f in g.incident_edges(u)),
                Multiset(states[f] for f in g.incident_edges(v)),
            )
        )
        return p.rule(t, x, states[e], sides)

    def aggregate(v, states):
        return p.aggregate(Multiset(states.values()))

    return EdgeProtocol(p.rounds, p.memory, rule, aggregate, name=p.name)


def run_symmetric_node_protocol(p: SymmetricNodeProtocol, g: Graph, inputs: Sequence[Any]) -> ExecutionTrace:
    return run_node_protocol(symmetric_node_as_plain(p, g), g, inputs)


def run_symmetric_edge_protocol(p: SymmetricEdgeProtocol, g: Graph, inputs: Sequence[Any]) -> ExecutionTrace:
    return run_edge_protocol(symmetric_edge_as_plain(p, g), g, inputs)


def run_protocol(p: AnyProtocol, g: Graph, inputs: Sequence[Any]) -> ExecutionTrace:
    """Dispatch on protocol type."""
    if isinstance(p, NodeProtocol):
        return run_node_protocol(p, g, inputs)
    if isinstance(p, EdgeProtocol):
        return run_edge_protocol(p, g, inputs)
    if isinstance(p, SymmetricNodeProtocol):
        return run_symmetric_node_protocol(p, g, inputs)
    if isinstance(p, SymmetricEdgeProtocol):
        return run_symmetric_edge_protocol(p, g, inputs)
    raise TypeError(f"not a protocol: {type(p).__name__}")


# -- equivariance ------------------------------------------------------------


@dataclass
class EquivarianceReport:
    equivariant: bool
    trials: int
    automorphisms_tried: int
    counterexample: dict[str, Any] | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "equivariant": self.equivariant,
            "trials": self.trials,
            "automorphisms_tried": self.automorphisms_tried,
            "counterexample": self.counterexample,
            "notes": self.notes,
        }


def automorphisms(g: Graph, limit: int = 256) -> list[tuple[int, ...]]:
    """Up to ``limit`` automorphisms of ``g`` as vertex maps ``pi[v]``, identity excluded."""
    from networkx.algorithms.isomorphism import GraphMatcher

    nxg = g.to_networkx()
    out = []
    for mapping in itertools.islice(GraphMatcher(nxg, nxg).isomorphisms_iter(), limit + 1):
        perm = tuple(mapping[v] for v in range(g.num_vertices))
        if any(perm[v] != v for v in range(g.num_vertices)):
            out.append(perm)
        if len(out) == limit:
            break
    return out


def permute_edge_input(g: Graph, perm: Sequence[int], inputs: Sequence[Any]) -> tuple[Any, ...]:
    """Input ``pi . I`` with ``(pi . I)(pi(e)) = I(e)``; ``perm`` must be an automorphism."""
    out: list[Any] = [None] * g.num_edges
    for e, (u, v) in enumerate(g.edges):
        out[g.edge_id(perm[u], perm[v])] = inputs[e]
    return tuple(out)


def _edge_permutation(g: Graph, perm: Sequence[int]) -> tuple[int, ...]:
    return tuple(g.edge_id(perm[u], perm[v]) for u, v in g.edges)


def check_equivariance(
    p: AnyProtocol,
    g: Graph,
    *,
    alphabet: Sequence[Any],
    trials: int = 50,
    seed: int = 0,
    permutations: Sequence[Sequence[int]] | None = None,
    level: str = "states",
) -> EquivarianceReport:
    """Empirically test equivariance under automorphisms ``pi`` of ``g``.

    With ``level="outputs"`` the check is ``outputs(pi . I) == pi . outputs(I)``.
    With ``level="states"`` (default) every round's processor states must move
    with ``pi`` as well, which every symmetric protocol satisfies; a protocol
    whose rules read processor labels can pass the output check while failing
    this one.
    """
    if level not in ("states", "outputs"):
        raise ValueError("level must be 'states' or 'outputs'")
    perms = [tuple(pm) for pm in permutations] if permutations is not None else automorphisms(g)
    for pm in perms:
        for u, v in g.edges:
            if not g.has_edge(pm[u], pm[v]):
                raise InvalidProtocolError(f"permutation {pm} is not an automorphism")
    if not perms:
        return EquivarianceReport(True, 0, 0, notes=["graph has no non-trivial automorphism"])
    stream = SeededStream(seed)
    for k in range(trials):
        pm = perms[stream.randbelow(len(perms))]
        inputs = tuple(alphabet[stream.randbelow(len(alphabet))] for _ in range(g.num_edges))
        base = run_protocol(p, g, inputs)
        moved = run_protocol(p, g, permute_edge_input(g, pm, inputs))
        problem = None
        if level == "states":
            proc = pm if base.kind == "node" else _edge_permutation(g, pm)
            for t in range(1, base.rounds + 1):
                if any(moved.states[t][proc[q]] != s for q, s in enumerate(base.states[t])):
                    problem = f"states differ after round {t}"
                    break
        if problem is None and any(moved.outputs[pm[v]] != base.outputs[v] for v in range(g.num_vertices)):
            problem = "outputs differ"
        if problem is not None:
            return EquivarianceReport(
                False,
                k + 1,
                len(perms),
                counterexample={
                    "reason": problem,
                    "permutation": list(pm),
                    "input": list(inputs),
                    "outputs": list(base.outputs),
                    "permuted_outputs": list(moved.outputs),
                },
            )
    return EquivarianceReport(True, trials, len(perms), notes=[f"checked {level}"])


# -- small reference protocols -------------------------------------------------


def build_copy_edge_protocol() -> EdgeProtocol:
    """One round: each edge stores its own input bit; vertices output the OR of incident edges."""

    def rule(t, e, states, x):
        return (_bit(x, f"edge {e} input"),)

    def aggregate(v, states):
        return int(any(s[0] for s in states.values()))

    return EdgeProtocol(1, 1, rule, aggregate, name="copy")


def build_symmetric_copy_protocol() -> SymmetricEdgeProtocol:
    """Symmetric form of :func:`build_copy_edge_protocol`."""

    def rule(t, x, own, sides):
        return (_bit(x, "input"),)

    def aggregate(states):
        return int(any(s[0] for s in states))

    return SymmetricEdgeProtocol(1, rule, aggregate, memory=1, name="symmetric-copy")
