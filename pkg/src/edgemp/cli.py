"""Command-line entry point.

Every artifact-producing command prints JSON to stdout, or with ``-o PATH``
writes it to ``PATH`` together with a run manifest at
``PATH.manifest.json``. ``edgemp replay PATH.manifest.json`` reruns the
recorded arguments and checks the output digests.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
"""
from __future__ import annotations

import argparse
import json
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .certificates import certified_lower_bound
from .errors import EdgempError
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
    PRESETS,
    IsingModel,
    bp_marginals,
    directed_node_dp,
    exact_marginals_bruteforce,
    generate_ising_dataset,
)
from .manifest import RunManifest, dumps, manifest_path, read_json, sha256_file, write_json
from .mapinf import (
    brute_force_map,
    build_map_edge_protocol,
    build_proof_lower_bound_instance,
    dp_map_hub_path,
    dp_map_hub_path_batch,
    energy,
)
from .protocols import (
    EdgeProtocol,
    SymmetricEdgeProtocol,
    build_copy_edge_protocol,
    build_symmetric_copy_protocol,
    run_protocol,
)
from .rng import SeededStream
from .simulation import simulate_edge_with_node, symmetric_edge_to_node
from .tasks import (
    binary_star_task_g,
    build_counting_edge_protocol,
    build_disjointness_edge_protocol,
    build_histogram_node_protocol,
    build_large_alphabet_edge_protocol,
    counting_lower_bound_instance,
    counting_task_g,
    disj,
    disjointness_split,
    disjointness_task_g,
    large_alphabet_task_g,
)
from .verify import SUITES, format_table, resolve_suite


class UsageError(Exception):
    pass


# -- named graphs and protocols ---------------------------------------------------------

GRAPH_FAMILIES: dict[str, Callable[[argparse.Namespace], Graph]] = {
    "hub_path": lambda a: build_hub_path_graph(_need(a, "m")),
    "depth2_tree": lambda a: build_depth2_tree(_need(a, "m")),
    "star": lambda a: build_star(_need(a, "n")),
    "complete": lambda a: build_complete(_need(a, "n")),
    "random_tree": lambda a: random_tree(_need(a, "n"), a.seed),
    "path": lambda a: build_path(_need(a, "n")),
    "binary_tree": lambda a: build_binary_tree(_need(a, "depth")),
}

# name -> (builder(size) -> protocol, graph(size), alphabet size(size), size flag)
PROTOCOLS: dict[str, tuple[Callable[[int], Any], Callable[[int], Graph], Callable[[int], int], str]] = {
    "map": (build_map_edge_protocol, build_hub_path_graph, lambda m: 4, "m"),
    "counting": (build_counting_edge_protocol, build_depth2_tree, lambda m: 2, "m"),
    "large-alphabet": (build_large_alphabet_edge_protocol, build_star, lambda n: n, "n"),
    "histogram": (build_histogram_node_protocol, build_star, lambda n: 2, "n"),
    "disjointness": (build_disjointness_edge_protocol, build_complete, lambda n: 2, "n"),
    "copy": (lambda n: build_copy_edge_protocol(), build_star, lambda n: 2, "n"),
    "symmetric-copy": (lambda n: build_symmetric_copy_protocol(), build_star, lambda n: 2, "n"),
}


def _need(args: argparse.Namespace, name: str) -> int:
    value = getattr(args, name, None)
    if value is None:
        raise UsageError(f"--{name} is required here")
    return value


# -- input helpers ------------------------------------------------------------------------


def _load(args: argparse.Namespace, path: str | None) -> Any:
    if path is None:
        return None
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such file: {path}")
    args._inputs[str(path)] = sha256_file(p)
    return read_json(p)


def _symbols(args: argparse.Namespace, length: int, alphabet: int, offset: int = 0) -> list[int]:
    """Input symbols from ``--input``, ``--symbols`` or ``--random``."""
    data = _load(args, getattr(args, "input", None))
    if data is not None:
        symbols = data["symbols"] if isinstance(data, dict) else data
    elif getattr(args, "symbols", None):
        symbols = [int(s) for s in args.symbols.replace(",", " ").split()]
    elif getattr(args, "random", False):
        stream = SeededStream(args.seed)
        symbols = [offset + stream.randbelow(alphabet) for _ in range(length)]
    else:
        raise UsageError("give inputs with --input, --symbols or --random")
    if len(symbols) != length:
        raise UsageError(f"expected {length} input symbols, got {len(symbols)}")
    return [int(s) for s in symbols]


# -- commands -----------------------------------------------------------------------------


def cmd_graph_gen(args):
    return GRAPH_FAMILIES[args.family](args).to_dict()


def cmd_graph_line(args):
    return line_graph(Graph.from_dict(_load(args, args.input))).to_dict()


def _protocol(args):
    build, graph, alpha, flag = PROTOCOLS[args.protocol]
    size = _need(args, flag)
    return build(size), graph(size), alpha(size), size


def cmd_protocol_run(args):
    p, g, q, size = _protocol(args)
    offset = 1 if args.protocol == "large-alphabet" else 0
    inputs = _symbols(args, g.num_edges, q, offset)
    trace = run_protocol(p, g, inputs)
    return {"graph": g.to_dict(), "input": inputs, "trace": trace.to_dict()}


def cmd_protocol_simulate(args):
    p, g, q, size = _protocol(args)
    if isinstance(p, EdgeProtocol):
        sim = simulate_edge_with_node(p, g)
    elif isinstance(p, SymmetricEdgeProtocol):
        sim = symmetric_edge_to_node(p)
    else:
        raise UsageError(f"{args.protocol} is not an edge protocol")
    offset = 1 if args.protocol == "large-alphabet" else 0
    inputs = _symbols(args, g.num_edges, q, offset)
    a, b = run_protocol(p, g, inputs), run_protocol(sim, g, inputs)
    return {
        "protocol": p.name,
        "simulation": sim.name,
        "input": inputs,
        "rounds": [p.rounds, sim.rounds],
        "outputs": list(a.outputs),
        "simulated_outputs": list(b.outputs),
        "equal": a.outputs == b.outputs,
        "max_state_bits": [a.max_state_bits, b.max_state_bits],
    }


def cmd_map_solve(args):
    data = _load(args, args.input)
    if data is not None and isinstance(data, dict) and "graph" in data:
        g = Graph.from_dict(data["graph"])
        if args.m is None:
            args.m = int(g.params.get("m", 0)) or None
        args.input, args.symbols = None, ",".join(str(s) for s in data["symbols"])
    m = _need(args, "m")
    g = build_hub_path_graph(m)
    symbols = _symbols(args, g.num_edges, 4)
    if args.method == "dp":
        x = dp_map_hub_path(m, symbols)
    elif args.method == "brute":
        x = brute_force_map(g, symbols)
    else:
        x = run_protocol(build_map_edge_protocol(m), g, symbols).outputs
    return {"m": m, "method": args.method, "symbols": symbols, "assignment": list(x), "energy": energy(g, symbols, x)}


def cmd_certify(args):
    m = args.m
    if args.task == "map":
        inst = build_proof_lower_bound_instance(m, args.T)
        g = build_hub_path_graph(m)
        task, alphabet, vec = (lambda b: dp_map_hub_path_batch(m, b)), (0, 1, 2, 3), True
    else:
        if args.T != 1:
            raise UsageError("the counting instance is stated for T=1")
        inst = counting_lower_bound_instance(m)
        g = build_depth2_tree(m)
        task, alphabet, vec = (lambda I: counting_task_g(m, I)), (0, 1), False
    fixed = "search" if args.search_if else inst.fixed
    rep = certified_lower_bound(g, task, inst.K, inst.S, args.T, alphabet, fixed, budget=args.budget, vectorized=vec)
    out = rep.to_dict()
    out["task"] = args.task
    return out


def cmd_task_eval(args):
    size_flag = "m" if args.task == "counting" else "n"
    size = _need(args, size_flag)
    if args.task == "counting":
        g = build_depth2_tree(size)
        I = _symbols(args, g.num_edges, 2)
        return {"task": args.task, "m": size, "input": I, "output": list(counting_task_g(size, I))}
    if args.task == "large-alphabet":
        I = _symbols(args, size, size, offset=1)
        return {"task": args.task, "n": size, "input": I, "output": list(large_alphabet_task_g(size, I))}
    if args.task == "binary-star":
        I = _symbols(args, size, 2)
        return {"task": args.task, "n": size, "input": I, "output": list(binary_star_task_g(size, I))}
    g = build_complete(size)
    I = _symbols(args, g.num_edges, 2)
    X, Y = disjointness_split(size, I)
    return {
        "task": args.task,
        "n": size,
        "input": I,
        "output": list(disjointness_task_g(size, I)),
        "alice": list(X),
        "bob": list(Y),
        "disj": disj(X, Y),
    }


def cmd_ising_marginals(args):
    model = IsingModel.from_dict(_load(args, _need(args, "input")))
    if args.method == "bp":
        marg = bp_marginals(model, args.iters)
    elif args.method == "brute":
        marg = exact_marginals_bruteforce(model)
    else:
        marg = directed_node_dp(model, args.root)
    return {"method": args.method, "marginals": list(marg)}


def cmd_ising_dataset(args):
    if args.topology in PRESETS:
        topo: Any = args.topology
    else:
        size = {"binary_tree": "depth", "path": "n", "random_tree": "n"}[args.topology]
        topo = {"kind": args.topology, size: _need(args, size)}
    return generate_ising_dataset(topo, args.samples, args.seed, check_bruteforce=not args.no_check)


def cmd_star_dataset(args):
    return generate_star_dataset(args.leaves, args.depth, args.width, args.samples, args.seed, args.weight_scale)


def cmd_gcn_forward(args):
    data = _load(args, args.input)
    g = Graph.from_dict(data["graph"])
    stack = GcnStack.from_dict(data["stack"])
    h0 = np.asarray(data["h0"], dtype=np.float64)
    fwd = node_gcn_forward if args.mode == "node" else edge_gcn_forward
    return {"mode": args.mode, "output": fwd(g, stack, h0).tolist()}


def _run_suite(name: str):
    return SUITES[name][1]()


def cmd_verify(args):
    try:
        names = [resolve_suite(s) for s in args.suite] if args.suite else list(SUITES)
    except KeyError as exc:
        raise UsageError(f"unknown suite {exc.args[0]!r}; choose from {', '.join(SUITES)}") from None
    overrides = {}
    if args.m is not None:
        overrides = {"map-protocol": {"ms": (args.m,)}, "map-dp": {"ms": (args.m,)}, "certificate": {"ms": (args.m,)}}
    if args.jobs > 1 and not overrides:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_suite, names))
    else:
        results = [SUITES[n][1](**overrides.get(n, {})) for n in names]
    report = {"suites": [r.to_dict() for r in results], "passed": all(r.passed for r in results)}
    args._table = format_table(results)
    args._status = 0 if report["passed"] else 1
    return report


def cmd_replay(args):
    man = RunManifest.load(args.manifest)
    problems = []
    for path, digest in man.inputs.items():
        if not Path(path).exists():
            problems.append(f"input {path} missing")
        elif sha256_file(path) != digest:
            problems.append(f"input {path} changed")
    results = {}
    with tempfile.TemporaryDirectory() as tmp:
        out = str(Path(tmp) / "replay.json")
        code = main(list(man.argv) + ["-o", out], _quiet=True)
        got = sha256_file(out) if Path(out).exists() else None
    for name, digest in man.outputs.items():
        results[name] = {"recorded": digest, "replayed": got, "match": got == digest}
    ok = code in (0, 1) and not problems and all(r["match"] for r in results.values())
    args._status = 0 if ok else 1
    args._table = ("replay OK" if ok else "replay MISMATCH") + "".join(f"\n  {p}" for p in problems)
    return {"manifest": str(args.manifest), "outputs": results, "problems": problems, "reproduced": ok}


# -- parser -------------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("-o", "--output", help="write JSON here (plus a run manifest)")
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--budget", type=int, default=1 << 22, help="enumeration budget for certificates")
    p.add_argument("--format", choices=("json", "text"), help="report format (default: text for verify/replay, json otherwise)")
    return p


def _inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="JSON file with a list of symbols or {'symbols': [...]} ")
    p.add_argument("--symbols", help="comma-separated input symbols")
    p.add_argument("--random", action="store_true", help="draw inputs from --seed")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="edgemp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"edgemp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(group, name: str, fn, help: str) -> argparse.ArgumentParser:
        p = group.add_parser(name, parents=[common], help=help)
        p.set_defaults(fn=fn)
        return p

    graph = sub.add_parser("graph", help="construct graphs").add_subparsers(dest="action", required=True)
    p = leaf(graph, "gen", cmd_graph_gen, "build a graph family")
    p.add_argument("--family", choices=sorted(GRAPH_FAMILIES), required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--depth", type=int)
    p = leaf(graph, "line", cmd_graph_line, "line graph of a graph file")
    p.add_argument("--input", required=True)

    proto = sub.add_parser("protocol", help="run shipped protocols").add_subparsers(dest="action", required=True)
    for name, fn, text in (
        ("run", cmd_protocol_run, "run a protocol and dump its trace"),
        ("simulate", cmd_protocol_simulate, "compare an edge protocol with its node simulation"),
    ):
        p = leaf(proto, name, fn, text)
        p.add_argument("--protocol", choices=sorted(PROTOCOLS), required=True)
        p.add_argument("--m", type=int)
        p.add_argument("--n", type=int)
        _inputs(p)

    mp = sub.add_parser("map", help="MAP inference").add_subparsers(dest="action", required=True)
    p = leaf(mp, "solve", cmd_map_solve, "solve a hub-path MAP instance")
    p.add_argument("--method", choices=("dp", "brute", "edge-protocol"), default="dp")
    p.add_argument("--m", type=int)
    _inputs(p)

    p = leaf(sub, "certify", cmd_certify, "light-cone lower-bound certificate")
    p.add_argument("--task", choices=("map", "counting"), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--T", type=int, default=1)
    p.add_argument("--search-if", action="store_true", help="maximize over all fixings of F")

    task = sub.add_parser("task", help="evaluate task functions").add_subparsers(dest="action", required=True)
    p = leaf(task, "eval", cmd_task_eval, "evaluate a task on one input")
    p.add_argument("--task", choices=("counting", "large-alphabet", "binary-star", "disjointness"), required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    _inputs(p)

    ising = sub.add_parser("ising", help="Ising marginals and datasets").add_subparsers(dest="action", required=True)
    p = leaf(ising, "marginals", cmd_ising_marginals, "marginals of a model file")
    p.add_argument("--method", choices=("bp", "brute", "node-dp"), default="bp")
    p.add_argument("--input", required=True)
    p.add_argument("--iters", type=int)
    p.add_argument("--root", type=int, default=0)
    p = leaf(ising, "dataset", cmd_ising_dataset, "generate a marginal-regression dataset")
    p.add_argument("--topology", choices=sorted(PRESETS) + ["binary_tree", "path", "random_tree"], required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--no-check", action="store_true", help="skip the brute-force cross-check")

    star = sub.add_parser("star-dataset", help="planted star dataset").add_subparsers(dest="action", required=True)
    p = leaf(star, "gen", cmd_star_dataset, "generate a planted-label star dataset")
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--width", type=int, default=10)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--weight-scale", type=float, default=1.0)

    gcn = sub.add_parser("gcn", help="GCN forward passes").add_subparsers(dest="action", required=True)
    p = leaf(gcn, "forward", cmd_gcn_forward, "forward pass from {'graph', 'stack', 'h0'}")
    p.add_argument("--mode", choices=("node", "edge"), required=True)
    p.add_argument("--input", required=True)

    p = leaf(sub, "verify", cmd_verify, "run acceptance suites")
    p.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)} (repeatable; default all)")
    p.add_argument("--m", type=int, help="restrict MAP suites to this m")

    p = leaf(sub, "replay", cmd_replay, "rerun a manifest and compare digests")
    p.add_argument("manifest")
    return parser


def _command_name(args: argparse.Namespace) -> str:
    return " ".join(x for x in (args.command, getattr(args, "action", None)) if x)


def _strip_output(argv: Sequence[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a in ("-o", "--output"):
            skip = True
        elif not a.startswith("--output="):
            out.append(a)
    return out


def main(argv: Sequence[str] | None = None, _quiet: bool = False) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args._inputs, args._status, args._table = {}, 0, None
    try:
        result = args.fn(args)
    except (UsageError, EdgempError, ValueError, KeyError) as exc:
        print(f"edgemp: error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        digest = write_json(args.output, result)
        params = {k: v for k, v in vars(args).items() if not k.startswith("_") and k not in ("fn", "output")}
        man = RunManifest(
            command=_command_name(args),
            argv=_strip_output(argv),
            parameters=json.loads(json.dumps(params, default=str)),
            seeds={"seed": args.seed},
            inputs=dict(args._inputs),
            outputs={Path(args.output).name: digest},
        )
        man.save(manifest_path(args.output))
    if not _quiet:
        fmt = args.format or ("text" if args._table is not None else "json")
        if fmt == "text" and args._table is not None:
            print(args._table)
        elif not args.output:
            sys.stdout.write(dumps(result))
    return args._status


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
