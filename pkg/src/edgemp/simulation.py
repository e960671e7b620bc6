"""Simulating edge protocols with node protocols.

Two constructions:

* :func:`simulate_edge_with_node` turns a bounded ``T``-round edge protocol
  into a ``T+1``-round node protocol in which every vertex keeps one ``B``-bit
  slot per incident edge.
* :func:`symmetric_edge_to_node` turns a symmetric ``T``-round edge protocol
  into a symmetric ``T+1``-round node protocol with unbounded states. It runs
  the universal accumulation protocol and decodes at readout.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Any

from .errors import InvalidProtocolError, UnsupportedModeError
from .graphs import Graph
from .protocols import (
    EdgeProtocol,
    SymmetricEdgeProtocol,
    SymmetricNodeProtocol,
    NodeProtocol,
    zeros,
)
from .structured import Multiset

#: Bits per simulated vertex beyond its ``degree * B`` slot bits: one output flag.
SLOT_OVERHEAD_BITS = 1


def slot_layout_width(g: Graph, memory: int) -> int:
    """State width of the simulating node protocol: flag bit + ``max_degree`` slots of ``memory`` bits."""
    return SLOT_OVERHEAD_BITS + g.max_degree * memory


def simulate_edge_with_node(p: EdgeProtocol, g: Graph) -> NodeProtocol:
    """Node protocol with ``p.rounds + 1`` rounds computing the same vertex outputs as ``p``.

    Layout of a vertex state: bit 0 is the output flag (set only in the last
    round), followed by one ``B``-bit slot per incident edge in ascending edge-id
    order; unused trailing slots stay zero. After round ``t`` the slots of
    ``v`` hold ``P_{t-1}(e)`` for ``e`` in ``M_G(v)``.
    """
    if p.memory is None:
        raise UnsupportedModeError("slot simulation needs a bounded edge protocol")
    B = p.memory
    width = slot_layout_width(g, B)
    slot_of = [{e: k for k, e in enumerate(g.incident_edges(v))} for v in range(g.num_vertices)]

    def read_slot(state, v, e):
        k = slot_of[v][e]
        start = SLOT_OVERHEAD_BITS + k * B
        return tuple(state[start : start + B])

    def rule(t, v, states, inputs):
        if t == 1:
            return zeros(width)
        slots = []
        for e_star in g.incident_edges(v):
            a, b = g.endpoints(e_star)
            other = b if a == v else a
            nbr = {}
            for f in g.edge_neighbors(e_star):
                holder = v if f in slot_of[v] else other
                nbr[f] = read_slot(states[holder], holder, f)
            s = p.rule(t - 1, e_star, nbr, inputs[e_star])
            if not isinstance(s, tuple) or len(s) != B:
                raise InvalidProtocolError(f"simulated edge {e_star} returned {s!r}, expected {B} bits")
            slots.append(s)
        flag = 0
        if t == p.rounds + 1:
            flag = int(p.aggregate(v, dict(zip(g.incident_edges(v), slots))))
        body = tuple(bit for s in slots for bit in s)
        return (flag,) + body + zeros(width - 1 - len(body))

    return NodeProtocol(p.rounds + 1, width, rule, name=f"node-sim[{p.name}]")


# -- symmetric simulation ----------------------------------------------------


def universal_rule(t: int, x: Any, own: Any, sides: Multiset) -> tuple:
    """Identity accumulation: the new state records everything the edge could see."""
    return (x, own, sides)


def make_decoder(p: SymmetricEdgeProtocol):
    """Return ``decode(universal_state, t)`` giving the state of ``p`` at round ``t``.

    Works because the universal state at round ``t`` contains the universal
    states of round ``t-1`` it was built from.
    """
    initial = zeros(p.memory) if p.memory is not None else 0

    @lru_cache(maxsize=None)
    def decode(state: Any, t: int) -> Any:
        if t == 0:
            return initial
        x, prev, sides = state
        decoded_sides = Multiset(Multiset(decode(q, t - 1) for q in side) for side in sides)
        return p.rule(t, x, decode(prev, t - 1), decoded_sides)

    return decode


def universal_protocol(p: SymmetricEdgeProtocol) -> SymmetricEdgeProtocol:
    """Unbounded protocol accumulating full views, with ``p``'s outputs recovered at aggregation."""
    decode = make_decoder(p)
    T = p.rounds

    def aggregate(states: Multiset) -> int:
        return p.aggregate(Multiset(decode(s, T) for s in states))

    return SymmetricEdgeProtocol(T, universal_rule, aggregate, memory=None, name=f"universal[{p.name}]")


def symmetric_edge_to_node(p: SymmetricEdgeProtocol, memory: int | None = None) -> SymmetricNodeProtocol:
    """Symmetric node protocol with ``p.rounds + 1`` rounds and the same outputs as ``p``.

    The state of vertex ``u`` after round ``t+1`` is the tuple
    ``(Q_0(u), ..., Q_t(u))`` where ``Q_s(u)`` is the multiset of universal edge
    states at round ``s`` over the edges incident to ``u``. The last entry is
    the simulated quantity; earlier entries let the vertex rebuild the
    universal state of each incident edge round by round.
    """
    if memory is not None:
        raise UnsupportedModeError("symmetric simulation is only defined with unbounded states")
    decode = make_decoder(p)
    T = p.rounds

    def rule(t: int, own: Any, nbrs: Multiset) -> tuple:
        if t == 1:
            return (Multiset(0 for _ in nbrs),)
        history = own
        q_new = []
        for nbr_history, x in nbrs:
            state = 0
            for s in range(1, t):
                state = universal_rule(s, x, state, Multiset((history[s - 1], nbr_history[s - 1])))
            q_new.append(state)
        return history + (Multiset(q_new),)

    def readout(state: tuple) -> int:
        return p.aggregate(Multiset(decode(q, T) for q in state[-1]))

    return SymmetricNodeProtocol(T + 1, rule, memory=None, readout=readout, name=f"sym-node-sim[{p.name}]")


def current_view(state: tuple) -> Multiset:
    """``Q_t(u)``: the last entry of a simulating vertex's state."""
    return state[-1]
