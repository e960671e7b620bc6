import json
import subprocess
import sys

import pytest

from edgemp.cli import main
from edgemp.graphs import Graph
from edgemp.manifest import RunManifest, manifest_path, read_json, sha256_file


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_graph_gen_hub_path(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, _ = run(capsys, "graph", "gen", "--family", "hub_path", "--m", "4", "-o", "g.json")
    assert code == 0
    g = Graph.from_dict(read_json("g.json"))
    assert (g.num_vertices, g.num_edges, g.family) == (17, 28, "hub_path")
    man = RunManifest.load(manifest_path("g.json"))
    assert man.command == "graph gen" and man.outputs["g.json"] == sha256_file("g.json")


def test_unknown_flag_exits_2(capsys):
    code, _, err = run(capsys, "graph", "gen", "--family", "star", "--bogus")
    assert code == 2 and "usage" in err


def test_parameter_error_exits_2(capsys):
    code, _, err = run(capsys, "graph", "gen", "--family", "star")
    assert code == 2 and "--n" in err
    code, _, _ = run(capsys, "graph", "gen", "--family", "star", "--n", "0")
    assert code == 2


def test_verify_map_m2(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "map", "--m", "2")
    assert code == 0 and "PASS" in out


def test_verify_unknown_suite(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "nope")
    assert code == 2


def test_verify_failure_exit_1(capsys, monkeypatch):
    from edgemp import verify

    def failing(**kw):
        r = verify.SuiteResult("broken", 0)
        r.add("always fails", False)
        return r

    monkeypatch.setitem(verify.SUITES, "broken", (0, failing))
    code, out, _ = run(capsys, "verify", "--suite", "broken")
    assert code == 1 and "FAIL" in out


def test_map_solve_methods_agree(capsys):
    outs = []
    for method in ("dp", "brute", "edge-protocol"):
        code, out, _ = run(capsys, "map", "solve", "--m", "2", "--method", method, "--symbols", "0,1,2,3,0,0")
        assert code == 0
        outs.append(json.loads(out)["assignment"])
    assert outs[0] == outs[1] == outs[2]


def test_map_solve_from_assignment_file(tmp_path, capsys):
    from edgemp.graphs import build_hub_path_graph

    f = tmp_path / "I.json"
    f.write_text(json.dumps({"graph": build_hub_path_graph(2).to_dict(), "symbols": [3, 3, 3, 1, 3, 3]}))
    code, out, _ = run(capsys, "map", "solve", "--input", str(f))
    assert code == 0 and json.loads(out)["m"] == 2


def test_certify_and_task_eval(capsys):
    code, out, _ = run(capsys, "certify", "--task", "map", "--m", "2")
    rep = json.loads(out)
    assert code == 0 and rep["distinct_outputs"] == 4 and rep["bound_TB"] == 2.0
    code, out, _ = run(capsys, "certify", "--task", "counting", "--m", "4")
    assert json.loads(out)["distinct_outputs"] >= 4
    code, out, _ = run(capsys, "task", "eval", "--task", "large-alphabet", "--n", "4", "--symbols", "1,2,2,3")
    assert json.loads(out)["output"] == [1, 0, 1, 1, 0]
    code, out, _ = run(capsys, "task", "eval", "--task", "disjointness", "--n", "4", "--symbols", "1,0,0,0,0,1")
    r = json.loads(out)
    assert r["output"] == [1] * 4 and r["disj"] == 0


def test_protocol_run_and_simulate(capsys):
    code, out, _ = run(capsys, "protocol", "run", "--protocol", "disjointness", "--n", "4", "--random", "--seed", "3")
    assert code == 0 and json.loads(out)["trace"]["rounds"] == 6
    for proto, size in (("map", "2"), ("counting", "2"), ("copy", "3"), ("symmetric-copy", "3")):
        flag = "--m" if proto in ("map", "counting") else "--n"
        code, out, _ = run(capsys, "protocol", "simulate", "--protocol", proto, flag, size, "--random", "--seed", "5")
        assert code == 0 and json.loads(out)["equal"]


def test_ising_and_gcn_commands(tmp_path, capsys):
    from edgemp.graphs import build_path, build_star
    from edgemp.gcn import GcnStack
    from edgemp.rng import SeededStream

    model = tmp_path / "model.json"
    model.write_text(json.dumps({"graph": build_path(4).to_dict(), "J": 1.0, "h": [0.5, 0, -0.2, 1]}))
    res = []
    for method in ("bp", "brute", "node-dp"):
        code, out, _ = run(capsys, "ising", "marginals", "--method", method, "--input", str(model))
        assert code == 0
        res.append(json.loads(out)["marginals"])
    assert max(abs(a - b) for a, b in zip(res[0], res[1])) < 1e-12
    stack = GcnStack.random(2, 3, SeededStream(0))
    inp = tmp_path / "gcn.json"
    inp.write_text(json.dumps({"graph": build_star(3).to_dict(), "stack": stack.to_dict(), "h0": [[0, 1, 2]] * 3}))
    code, out, _ = run(capsys, "gcn", "forward", "--mode", "edge", "--input", str(inp))
    assert code == 0 and len(json.loads(out)["output"]) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["graph", "gen", "--family", "random_tree", "--n", "30", "--seed", "9"],
        ["ising", "dataset", "--topology", "path30", "--samples", "2", "--seed", "1"],
        ["star-dataset", "gen", "--leaves", "16", "--depth", "1", "--samples", "2", "--seed", "4"],
        ["certify", "--task", "map", "--m", "2"],
    ],
)
def test_replay_reproduces(tmp_path, capsys, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    assert main(argv + ["-o", "out.json"]) == 0
    first = (tmp_path / "out.json").read_bytes()
    assert main(argv + ["-o", "again.json"]) == 0
    assert (tmp_path / "again.json").read_bytes() == first
    capsys.readouterr()
    code, out, _ = run(capsys, "replay", "out.json.manifest.json")
    assert code == 0 and "replay OK" in out


def test_replay_detects_tampering(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    main(["graph", "gen", "--family", "star", "--n", "3", "-o", "s.json"])
    man = read_json("s.json.manifest.json")
    man["outputs"]["s.json"] = "0" * 64
    (tmp_path / "s.json.manifest.json").write_text(json.dumps(man))
    capsys.readouterr()
    code, out, _ = run(capsys, "replay", "s.json.manifest.json")
    assert code == 1 and "MISMATCH" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "edgemp.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "edgemp" in proc.stdout


def test_verify_parallel_jobs(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "gcn", "--suite", "disjointness", "--jobs", "2")
    assert code == 0 and out.count("PASS") == 2
