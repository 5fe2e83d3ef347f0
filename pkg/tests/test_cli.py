from __future__ import annotations

import json
import random
import subprocess
import sys

import pytest

from conftest import GOLDEN
from isomat.cli import demo_checks, main
from isomat.forestgen import enumerate_trees, random_relabel
from isomat.isotropic import format_graph, ia_matroid, ias_matroid, parse_graph, path
from isomat.matroid import parse_ground_map, verify_map
from isomat.reconstruct import parse_vertex_map


def g(name):
    return str(GOLDEN / name)


@pytest.mark.parametrize("graph, which, golden", [
    ("c3.graph", "ias", "ias_c3.txt"),
    ("p3.graph", "ias", "ias_p3.txt"),
    ("p4.graph", "ia", "ia_p4.txt"),
    ("c4.graph", "ia", "ia_c4.txt"),
    ("p4.graph", "ias", "ias_p4.txt"),
])
def test_build_is_byte_exact(tmp_path, graph, which, golden):
    out = tmp_path / "m.txt"
    assert main(["build", g(graph), "--which", which, "--out", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / golden).read_bytes()
    labels = (tmp_path / "m.txt.labels").read_text().splitlines()
    assert labels[0] == "0 phi:0"


def test_build_stdout_and_json(capsys):
    assert main(["build", g("k1.graph"), "--which", "ia"]) == 0
    assert capsys.readouterr().out == "10\n\n0 phi:0\n1 chi:0\n"
    assert main(["build", g("p3.graph"), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["rows"]) == 3 and data["labels"][-1] == "psi:2"


def test_build_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("3 1\n0 3\n")
    assert main(["build", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["build", str(tmp_path / "missing.graph")]) == 2
    assert main(["build", g("p3.graph"), "--which", "xyz"]) == 2


@pytest.mark.parametrize("a, b, which, code", [
    ("c3.graph", "p3.graph", "ias", 0),
    ("p4.graph", "c4.graph", "ia", 0),
    ("p4.graph", "star3.graph", "ias", 1),
    ("p4.graph", "star3.graph", "ia", 1),
])
def test_check_iso(tmp_path, a, b, which, code):
    out = tmp_path / "f.map"
    assert main(["check-iso", g(a), g(b), "--which", which, "--out", str(out), "-q"]) == code
    if code == 0:
        build = ias_matroid if which == "ias" else ia_matroid
        A = build(parse_graph((GOLDEN / a).read_text()))
        B = build(parse_graph((GOLDEN / b).read_text()))
        assert verify_map(A, B, parse_ground_map(out.read_text()))
    else:
        assert not out.exists()


def test_check_iso_node_cap():
    assert main(["check-iso", g("p4.graph"), g("p4.graph"), "--node-cap", "1", "-q"]) == 4


def test_reconstruct_identity(tmp_path):
    M = ias_matroid(path(4))
    f = tmp_path / "id.map"
    f.write_text("".join(f"{x} -> {x}\n" for x in M.labels))
    out = tmp_path / "g.txt"
    assert main(["reconstruct", g("p4.graph"), g("p4.graph"), str(f), "--out", str(out)]) == 0
    assert out.read_text() == "0 -> 0\n1 -> 1\n2 -> 2\n3 -> 3\ncertified: yes\n"


def test_reconstruct_table_map(capsys):
    assert main(["reconstruct", g("p4.graph"), g("p4.graph"), g("p4_strange.map")]) == 0
    out = capsys.readouterr().out
    assert out.endswith("certified: yes\n")
    assert parse_vertex_map(out) in ({0: 0, 1: 1, 2: 2, 3: 3}, {0: 3, 1: 2, 2: 1, 3: 0})


def test_reconstruct_random_relabelled_tree(tmp_path):
    rng = random.Random(6)
    T = enumerate_trees(6)[3]
    T2, _ = random_relabel(T, rng)
    (tmp_path / "a.graph").write_text(format_graph(T))
    (tmp_path / "b.graph").write_text(format_graph(T2))
    mp = tmp_path / "f.map"
    for which in ("ia", "ias"):
        assert main(["check-iso", str(tmp_path / "a.graph"), str(tmp_path / "b.graph"),
                     "--which", which, "--out", str(mp), "-q"]) == 0
        out = tmp_path / f"g_{which}.json"
        assert main(["reconstruct", str(tmp_path / "a.graph"), str(tmp_path / "b.graph"), str(mp),
                     "--format", "json", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["which"] == which and data["certified"]
        gmap = {int(k): v for k, v in data["map"].items()}
        assert all(T2.adjacent(gmap[u], gmap[v]) for u, v in T.edges())


def test_reconstruct_failures(tmp_path, capsys):
    bad = tmp_path / "bad.map"
    bad.write_text("phi:0 -> chi:1\nphi:0 -> chi:2\n")
    assert main(["reconstruct", g("p3.graph"), g("p3.graph"), str(bad)]) == 2
    swap = tmp_path / "swap.map"
    M = ias_matroid(path(3))
    pairs = {x: x for x in M.labels}
    pairs[M.labels[0]], pairs[M.labels[3]] = M.labels[3], M.labels[0]
    swap.write_text("".join(f"{x} -> {y}\n" for x, y in pairs.items()))
    assert main(["reconstruct", g("p3.graph"), g("p3.graph"), str(swap)]) == 3
    assert "certification failed" in capsys.readouterr().err
    partial = tmp_path / "partial.map"
    partial.write_text("phi:0 -> phi:0\n")
    assert main(["reconstruct", g("p3.graph"), g("p3.graph"), str(partial)]) == 3
    assert main(["reconstruct", g("c3.graph"), g("c3.graph"), g("p4_strange.map"), "--which", "ias"]) == 2


def test_triangulations_p4_and_p3(capsys):
    assert main(["triangulations", g("p4.graph")]) == 0
    out = capsys.readouterr().out
    assert "all ps-equivalent to vertex triangulation: no" in out
    assert "all equivalent to vertex triangulation: yes" in out
    assert main(["triangulations", g("p3.graph"), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["all_ps_equivalent_to_vertex"] and data["count"] == 6


def test_triangulations_caps(capsys):
    assert main(["triangulations", g("star3.graph"), "--orbit-cap", "2"]) == 4
    assert main(["triangulations", g("p4.graph"), "--bound", "9"]) == 4
    assert main(["triangulations", g("c3.graph")]) == 2


def test_verify(tmp_path, capsys):
    out = tmp_path / "r.txt"
    assert main(["verify", "--n-max", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n, idA, idB") and len(lines) == 11
    assert "0 failures" in capsys.readouterr().err
    assert main(["verify", "--n-max", "3", "--format", "json", "-q"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ok"] and len(data["records"]) == 10
    assert main(["verify", "--n-max", "4", "--node-cap", "1", "-q", "--out", str(out)]) == 4
    assert out.read_text().endswith("# partial: resource cap reached\n")
    assert main(["verify", "--n-max", "8"]) == 2
    assert main(["verify", "--n-max", "0"]) == 2


def test_verify_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["verify", "--n-max", "3", "--format", "json", "--out", str(p), "-q"])

    def records(p):
        return [{k: v for k, v in r.items() if k != "millis"} for r in json.loads(p.read_text())["records"]]

    assert records(a) == records(b)


def test_demo(capsys):
    assert main(["demo"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 7 and "FAIL" not in out
    assert all(ok for _, ok in demo_checks())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "isomat", "build", g("k1.graph"), "--which", "ia"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("10\n\n")


def test_missing_subcommand():
    assert main([]) == 2
