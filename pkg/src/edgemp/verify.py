"""Executable acceptance suites.

Each suite is a function returning a :class:`SuiteResult` made of named
checks. ``SUITES`` maps suite names to ``(criterion number, function)``; the
CLI's ``verify`` command and the test-suite both call through it.
"""
from __future__ import annotations

import itertools
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .certificates import certified_lower_bound
from .gcn import GcnStack, edge_gcn_forward, generate_star_dataset, node_gcn_forward
from .graphs import (
    Graph,
    build_binary_tree,
    build_complete,
    build_depth2_tree,
    build_hub_path_graph,
    build_path,
    build_star,
    line_graph,
    random_tree,
)
from .ising import (
    IsingModel,
    bp_marginals,
    directed_node_dp,
    exact_marginals_bruteforce,
    generate_ising_dataset,
)
from .manifest import RunManifest, dumps, sha256_bytes
from .mapinf import (
    brute_force_map,
    build_map_edge_protocol,
    build_proof_lower_bound_instance,
    dp_map_hub_path,
    dp_map_hub_path_batch,
    energy,
)
from .protocols import (
    bits_to_int,
    build_copy_edge_protocol,
    build_symmetric_copy_protocol,
    run_protocol,
)
from .rng import SeededStream
from .simulation import SLOT_OVERHEAD_BITS, simulate_edge_with_node, symmetric_edge_to_node
from .tasks import (
    build_counting_edge_protocol,
    build_disjointness_edge_protocol,
    counting_lower_bound_instance,
    counting_task_g,
    disj,
    disjointness_split,
    disjointness_task_g,
    input_summation,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    criterion: int
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return bool(passed)

    def summary(self) -> str:
        bad = [c.name for c in self.checks if not c.passed]
        status = "PASS" if self.passed else "FAIL"
        tail = f"failed: {', '.join(bad)}" if bad else f"{len(self.checks)} checks"
        return f"[{status}] criterion {self.criterion:>2} {self.name:<22} {tail} ({self.seconds:.2f}s)"

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.name,
            "criterion": self.criterion,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def _random_inputs(seed: int, count: int, length: int, alphabet_size: int) -> Iterable[tuple[int, ...]]:
    root = SeededStream(seed)
    for k in range(count):
        s = root.child(k)
        yield tuple(s.randbelow(alphabet_size) for _ in range(length))


def _all_inputs(length: int, alphabet_size: int) -> Iterable[tuple[int, ...]]:
    return itertools.product(range(alphabet_size), repeat=length)


def _first_mismatch(pairs: Iterable[tuple[Any, Any, Any]]) -> tuple[int, Any]:
    """Count compared items and return the first input whose two values differ."""
    n = 0
    for inp, a, b in pairs:
        n += 1
        if a != b:
            return n, inp
    return n, None


# -- 1: MAP edge protocol -------------------------------------------------------------


def suite_map_protocol(ms: Sequence[int] = (2, 3, 4), samples: int = 200, seed: int = 0) -> SuiteResult:
    res = SuiteResult("map-protocol", 1)
    t0 = time.perf_counter()
    for m in ms:
        p = build_map_edge_protocol(m)
        g = build_hub_path_graph(m)
        exhaustive = m == 2
        inputs = _all_inputs(g.num_edges, 4) if exhaustive else _random_inputs(seed, samples, g.num_edges, 4)
        peak, rounds = 0, set()

        def pairs():
            nonlocal peak
            for I in inputs:
                tr = run_protocol(p, g, I)
                peak = max(peak, tr.max_state_bits)
                rounds.add(tr.rounds)
                yield I, tr.outputs, dp_map_hub_path(m, I)

        n, bad = _first_mismatch(pairs())
        label = "all" if exhaustive else "random"
        res.add(f"m={m} outputs == dp ({label} {n})", bad is None, f"first mismatch {bad}" if bad else "")
        res.add(f"m={m} rounds == 3", p.rounds == 3 and rounds == {3}, str(sorted(rounds)))
        res.add(f"m={m} max state bits == 4", peak == 4, f"peak {peak}")
    res.seconds = time.perf_counter() - t0
    res.add("runtime < 60s", res.seconds < 60, f"{res.seconds:.2f}s")
    return res


# -- 2: DP vs brute force ---------------------------------------------------------------


def suite_map_dp(ms: Sequence[int] = (2, 3, 4), samples: int = 200, seed: int = 1) -> SuiteResult:
    res = SuiteResult("map-dp", 2)
    t0 = time.perf_counter()
    for m in ms:
        g = build_hub_path_graph(m)
        exhaustive = m == 2
        inputs = list(_all_inputs(g.num_edges, 4) if exhaustive else _random_inputs(seed, samples, g.num_edges, 4))
        assign_bad = energy_bad = None
        for I in inputs:
            a, b = dp_map_hub_path(m, I), brute_force_map(g, I)
            if energy(g, I, a) != energy(g, I, b) and energy_bad is None:
                energy_bad = I
            if a != b and assign_bad is None:
                assign_bad = I
        label = "all" if exhaustive else "random"
        res.add(f"m={m} assignment equality ({label} {len(inputs)})", assign_bad is None, str(assign_bad or ""))
        res.add(f"m={m} energy equality ({label} {len(inputs)})", energy_bad is None, str(energy_bad or ""))
        batch = dp_map_hub_path_batch(m, np.array(inputs))
        res.add(
            f"m={m} batch dp == scalar dp",
            all(tuple(int(v) for v in row) == dp_map_hub_path(m, I) for row, I in zip(batch, inputs)),
        )
    res.seconds = time.perf_counter() - t0
    return res


# -- 3: light-cone certificate -------------------------------------------------------------


def map_certificate(m: int, T: int = 1, budget: int = 1 << 22):
    inst = build_proof_lower_bound_instance(m, T)
    g = build_hub_path_graph(m)
    report = certified_lower_bound(
        g,
        lambda batch: dp_map_hub_path_batch(m, batch),
        inst.K,
        inst.S,
        T,
        alphabet=(0, 1, 2, 3),
        fixed=inst.fixed,
        budget=budget,
        vectorized=True,
    )
    return inst, report


def suite_certificate(ms: Sequence[int] = (2, 3)) -> SuiteResult:
    res = SuiteResult("certificate", 3)
    t0 = time.perf_counter()
    for m in ms:
        inst, rep = map_certificate(m)
        res.add(f"m={m} M == 2^{m}", rep.distinct_outputs == 2**m, f"M={rep.distinct_outputs}")
        res.add(f"m={m} bound == {m}", rep.bound == float(m), f"bound={rep.bound}")
        res.add(
            f"m={m} exhaustive",
            rep.exhaustive and rep.completions_enumerated == rep.completions_total,
            f"{rep.completions_enumerated}/{rep.completions_total}",
        )
        ys = list(itertools.product((0, 1), repeat=m))
        realized = {tuple(dp_map_hub_path(m, inst.full_input(y))[v] for v in inst.S) for y in ys}
        res.add(f"m={m} pinned completions realize every y", realized == set(ys))
    res.seconds = time.perf_counter() - t0
    res.add("runtime < 60s", res.seconds < 60, f"{res.seconds:.2f}s")
    return res


# -- 4: counting task ------------------------------------------------------------------------


def counting_certificate(m: int):
    inst = counting_lower_bound_instance(m)
    g = build_depth2_tree(m)
    rep = certified_lower_bound(
        g, lambda I: counting_task_g(m, I), inst.K, inst.S, 1, alphabet=(0, 1), fixed=inst.fixed
    )
    return inst, rep


def suite_counting(ms: Sequence[int] = (2, 4, 5), samples: int = 200, seed: int = 2) -> SuiteResult:
    res = SuiteResult("counting", 4)
    t0 = time.perf_counter()
    for m in ms:
        g = build_depth2_tree(m)
        p = build_counting_edge_protocol(m)
        exhaustive = m == 2
        inputs = _all_inputs(g.num_edges, 2) if exhaustive else _random_inputs(seed, samples, g.num_edges, 2)
        out_bad = c_bad = None
        max_int = 0
        n = 0
        for I in inputs:
            n += 1
            tr = run_protocol(p, g, I)
            if tr.outputs != counting_task_g(m, I) and out_bad is None:
                out_bad = I
            if tuple(bits_to_int(s) for s in tr.states[2]) != input_summation(g, I) and c_bad is None:
                c_bad = I
            max_int = max(max_int, max(bits_to_int(s) for rnd in tr.states for s in rnd))
        label = "all" if exhaustive else "random"
        res.add(f"m={m} outputs == g ({label} {n})", out_bad is None, str(out_bad or ""))
        res.add(f"m={m} round-2 states == C(I)", c_bad is None, str(c_bad or ""))
        res.add(f"m={m} max state integer <= 2m+1", max_int <= 2 * m + 1, f"max {max_int}")
    for m in (2, 4):
        inst, rep = counting_certificate(m)
        res.add(
            f"m={m} certificate M >= 2^{m // 2}",
            rep.distinct_outputs >= 2 ** (m // 2) and rep.exhaustive,
            f"M={rep.distinct_outputs}, bound={rep.bound}",
        )
        xs = list(itertools.product((0, 1), repeat=m // 2))
        got = {tuple(counting_task_g(m, inst.full_input(x))[u] for u in inst.S) for x in xs}
        res.add(f"m={m} proof completions give {len(xs)} distinct outputs", len(got) == len(xs))
    res.seconds = time.perf_counter() - t0
    return res


# -- 5: disjointness -------------------------------------------------------------------------


def suite_disjointness(ns: Sequence[int] = (4, 6), samples: int = 200, seed: int = 3) -> SuiteResult:
    res = SuiteResult("disjointness", 5)
    t0 = time.perf_counter()
    for n in ns:
        g = build_complete(n)
        p = build_disjointness_edge_protocol(n)
        exhaustive = n == 4
        inputs = _all_inputs(g.num_edges, 2) if exhaustive else _random_inputs(seed, samples, g.num_edges, 2)
        out_bad = disj_bad = None
        peak, rounds, count = 0, set(), 0
        for I in inputs:
            count += 1
            tr = run_protocol(p, g, I)
            peak = max(peak, tr.max_state_bits)
            rounds.add(tr.rounds)
            want = disjointness_task_g(n, I)
            if tr.outputs != want and out_bad is None:
                out_bad = I
            X, Y = disjointness_split(n, I)
            if want[0] != 1 - disj(X, Y) and disj_bad is None:
                disj_bad = I
        label = "all" if exhaustive else "random"
        res.add(f"n={n} outputs == g ({label} {count})", out_bad is None, str(out_bad or ""))
        res.add(f"n={n} g == 1 - DISJ(X, Y)", disj_bad is None, str(disj_bad or ""))
        res.add(f"n={n} rounds == 6", p.rounds == 6 and rounds == {6})
        res.add(f"n={n} state bits == 1", peak == 1, f"peak {peak}")
    res.seconds = time.perf_counter() - t0
    return res


# -- 6, 7: simulations -------------------------------------------------------------------------


def _simulation_cases():
    return [
        ("map m=2", build_map_edge_protocol(2), build_hub_path_graph(2), 4),
        ("copy star n=3", build_copy_edge_protocol(), build_star(3), 2),
    ]


def suite_edge_simulation() -> SuiteResult:
    res = SuiteResult("edge-simulation", 6)
    t0 = time.perf_counter()
    for label, p, g, q in _simulation_cases():
        sim = simulate_edge_with_node(p, g)
        bad, peak, count = None, 0, 0
        for I in _all_inputs(g.num_edges, q):
            count += 1
            tr = run_protocol(sim, g, I)
            peak = max(peak, tr.max_state_bits)
            if tr.outputs != run_protocol(p, g, I).outputs and bad is None:
                bad = I
        limit = g.max_degree * p.memory + SLOT_OVERHEAD_BITS
        res.add(f"{label}: rounds == T+1", sim.rounds == p.rounds + 1, f"{sim.rounds}")
        res.add(f"{label}: outputs equal (all {count})", bad is None, str(bad or ""))
        res.add(f"{label}: memory <= D*B + {SLOT_OVERHEAD_BITS}", peak <= limit, f"{peak} <= {limit}")
    res.seconds = time.perf_counter() - t0
    return res


def suite_symmetric_simulation() -> SuiteResult:
    res = SuiteResult("symmetric-simulation", 7)
    t0 = time.perf_counter()
    cases = [
        ("counting m=2", build_counting_edge_protocol(2), build_depth2_tree(2)),
        ("copy star n=3", build_symmetric_copy_protocol(), build_star(3)),
    ]
    for label, p, g in cases:
        sim = symmetric_edge_to_node(p)
        bad, count = None, 0
        for I in _all_inputs(g.num_edges, 2):
            count += 1
            if run_protocol(sim, g, I).outputs != run_protocol(p, g, I).outputs and bad is None:
                bad = I
        res.add(f"{label}: rounds == T+1", sim.rounds == p.rounds + 1, f"{sim.rounds}")
        res.add(f"{label}: outputs equal (all {count})", bad is None, str(bad or ""))
    res.seconds = time.perf_counter() - t0
    return res


# -- 8: belief propagation ----------------------------------------------------------------------


def _bp_models(trees: int, seed: int) -> Iterable[tuple[str, IsingModel]]:
    root = SeededStream(seed)
    for k in range(trees):
        s = root.child(k)
        n = 2 + s.randbelow(11)
        g = random_tree(n, seed * 1000 + k)
        yield f"random_tree({n})#{k}", IsingModel.uniform(g, s.normals(n))
    s = root.child(trees)
    yield "path(10)", IsingModel.uniform(build_path(10), s.normals(10))
    yield "binary_tree(3)", IsingModel.uniform(build_binary_tree(3), s.normals(15))


def suite_bp(trees: int = 100, seed: int = 4) -> SuiteResult:
    res = SuiteResult("bp", 8)
    t0 = time.perf_counter()
    err_bf = err_dp = err_root = 0.0
    worst = ""
    count = 0
    for label, model in _bp_models(trees, seed):
        count += 1
        bp = np.array(bp_marginals(model))
        e = float(np.max(np.abs(bp - np.array(exact_marginals_bruteforce(model)))))
        if e > err_bf:
            err_bf, worst = e, label
        dp0 = np.array(directed_node_dp(model, 0))
        err_dp = max(err_dp, float(np.max(np.abs(dp0 - bp))))
        for r in range(1, model.graph.num_vertices):
            err_root = max(err_root, float(np.max(np.abs(np.array(directed_node_dp(model, r)) - dp0))))
    res.add(f"|BP - brute force| <= 1e-9 ({count} trees)", err_bf <= 1e-9, f"max {err_bf:.3g} at {worst}")
    res.add("|node DP - BP| <= 1e-12", err_dp <= 1e-12, f"max {err_dp:.3g}")
    res.add("node DP root invariance <= 1e-12", err_root <= 1e-12, f"max {err_root:.3g}")
    res.seconds = time.perf_counter() - t0
    res.add("runtime < 120s", res.seconds < 120, f"{res.seconds:.2f}s")
    return res


# -- 9: forward-pass identity ------------------------------------------------------------------


def random_graph(n: int, p: float, stream: SeededStream) -> Graph:
    """``G(n, p)`` from a seeded stream (edges tested in lexicographic order)."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if stream.uniform() < p]
    return Graph(n, edges, family="custom", params={"model": "gnp", "n": n, "p": p}, seed=stream.seed)


def suite_gcn(graphs: int = 20, seed: int = 5) -> SuiteResult:
    res = SuiteResult("gcn", 9)
    t0 = time.perf_counter()
    root = SeededStream(seed)
    bad = []
    for k in range(graphs):
        s = root.child(k)
        n = 3 + s.randbelow(10)
        g = random_tree(n, seed * 1000 + k) if k % 2 else random_graph(n, 0.4, s.child(0))
        if g.num_edges == 0:
            g = build_path(n)
        width = 1 + s.randbelow(6)
        stack = GcnStack.random(1 + s.randbelow(4), width, s.child(1))
        h0 = np.array(s.normals(g.num_edges * width)).reshape(g.num_edges, width)
        a = edge_gcn_forward(g, stack, h0)
        b = node_gcn_forward(line_graph(g), stack, h0)
        if a.tobytes() != b.tobytes():
            bad.append(k)
    res.add(f"edge pass == node pass on line graph, bitwise ({graphs} graphs)", not bad, str(bad))
    g = build_hub_path_graph(3)
    s = root.child(graphs)
    xv = np.array(s.normals(g.num_vertices * 4)).reshape(-1, 4)
    xe = np.array(s.normals(g.num_edges * 4)).reshape(-1, 4)
    ok = all(
        np.array_equal(node_gcn_forward(g, GcnStack.zeros(d, 4), xv), xv)
        and np.array_equal(edge_gcn_forward(g, GcnStack.zeros(d, 4), xe), xe)
        for d in range(1, 11)
    )
    res.add("zero weights give the identity at depths 1-10", ok)
    res.seconds = time.perf_counter() - t0
    return res


# -- 10: reproducibility -----------------------------------------------------------------------


def _generators(seed: int) -> list[tuple[str, Callable[[], Any]]]:
    return [
        ("hub_path(4)", lambda: build_hub_path_graph(4).to_dict()),
        ("depth2_tree(3)", lambda: build_depth2_tree(3).to_dict()),
        ("star(5)", lambda: build_star(5).to_dict()),
        ("complete(6)", lambda: build_complete(6).to_dict()),
        ("random_tree(30)", lambda: random_tree(30, seed).to_dict()),
        ("line_graph(hub_path(3))", lambda: line_graph(build_hub_path_graph(3)).to_dict()),
        ("ising binary31", lambda: generate_ising_dataset("binary31", 3, seed)),
        ("ising path30", lambda: generate_ising_dataset("path30", 3, seed)),
        ("ising random30", lambda: generate_ising_dataset("random30", 3, seed)),
        ("star dataset 16x3", lambda: generate_star_dataset(16, 3, 10, 3, seed)),
    ]


def suite_reproducibility(seed: int = 6) -> SuiteResult:
    res = SuiteResult("reproducibility", 10)
    t0 = time.perf_counter()
    for label, make in _generators(seed):
        a, b = dumps(make()).encode(), dumps(make()).encode()
        res.add(f"{label} byte-identical", a == b, sha256_bytes(a)[:16])
    man = RunManifest(
        command="graph gen",
        argv=["graph", "gen", "--family", "random_tree", "--n", "30", "--seed", str(seed)],
        parameters={"family": "random_tree", "n": 30},
        seeds={"seed": seed},
        outputs={"out.json": sha256_bytes(dumps(random_tree(30, seed).to_dict()).encode())},
    )
    res.add("manifest dict round-trip", RunManifest.from_dict(man.to_dict()) == man)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "m.json"
        man.save(path)
        res.add("manifest file round-trip", RunManifest.load(path) == man)
    res.add("CLI manifest replay", _cli_replay(seed))
    res.seconds = time.perf_counter() - t0
    return res


def _cli_replay(seed: int) -> bool:
    import contextlib
    import io

    from .cli import main

    with tempfile.TemporaryDirectory() as tmp, contextlib.redirect_stdout(io.StringIO()):
        out = str(Path(tmp) / "tree.json")
        if main(["graph", "gen", "--family", "random_tree", "--n", "30", "--seed", str(seed), "-o", out]) != 0:
            return False
        return main(["replay", out + ".manifest.json"]) == 0


SUITES: dict[str, tuple[int, Callable[..., SuiteResult]]] = {
    "map-protocol": (1, suite_map_protocol),
    "map-dp": (2, suite_map_dp),
    "certificate": (3, suite_certificate),
    "counting": (4, suite_counting),
    "disjointness": (5, suite_disjointness),
    "edge-simulation": (6, suite_edge_simulation),
    "symmetric-simulation": (7, suite_symmetric_simulation),
    "bp": (8, suite_bp),
    "gcn": (9, suite_gcn),
    "reproducibility": (10, suite_reproducibility),
}

ALIASES = {"map": "map-protocol", "dp": "map-dp", "certify": "certificate", "ising": "bp"}


def resolve_suite(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in SUITES:
        raise KeyError(name)
    return name


def run_suites(names: Sequence[str] | None = None, **kwargs: Any) -> list[SuiteResult]:
    names = list(SUITES) if not names else [resolve_suite(n) for n in names]
    return [SUITES[n][1](**kwargs) for n in names]


def format_table(results: Sequence[SuiteResult]) -> str:
    lines = [r.summary() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} suites passed")
    return "\n".join(lines)
