from __future__ import annotations

import json
import subprocess
import sys

import pytest

from mdkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert len(lines) == 1
    return code, json.loads(lines[0])


@pytest.fixture
def files(tmp_path):
    (tmp_path / "p5.txt").write_text("p graph 5 4\ne 1 2\ne 2 3\ne 3 4\ne 4 5\n")
    (tmp_path / "k3.txt").write_text("p graph 3 3\ne 1 2\ne 1 3\ne 2 3\n")
    (tmp_path / "f.cnf").write_text("p cnf 2 2\n1 -2 0\n2 0\n")
    (tmp_path / "inst.json").write_text('{"d":2,"vars":3,"clauses":[[[0,1],[1,1],[2,2]]]}')
    (tmp_path / "planted.txt").write_text(
        "p graph 27 39\n" + "".join(f"e 1 {2 * i + 2}\n" for i in range(13))
        + "".join(f"e {2 * i + 2} {2 * i + 3}\n" for i in range(13))
        + "".join(f"e 1 {2 * i + 3}\n" for i in range(13))
    )
    return tmp_path


def test_md(capsys, files):
    code, rec = run(capsys, "md", "--graph", str(files / "p5.txt"))
    assert code == 0
    assert rec["outcome"]["value"] == 1 and rec["outcome"]["status"] == "EXACT"
    assert rec["command"] == "md" and set(rec["input_hashes"]) == {str(files / "p5.txt")}
    code, rec = run(capsys, "md", "--graph", str(files / "k3.txt"), "--k", "1")
    assert rec["outcome"]["status"] == "EXCEEDS_BOUND"


def test_md_node_cap(capsys, files, monkeypatch):
    code, _ = run(capsys, "gen", "nae", "--in", str(files / "inst.json"), "--out-dir", str(files / "g"))
    assert code == 0
    monkeypatch.setenv("MDKIT_NODE_CAP", "1")
    code, rec = run(capsys, "md", "--graph", str(files / "g" / "graph.txt"))
    assert code == 3 and rec["outcome"]["status"] == "INDETERMINATE"
    code, rec = run(capsys, "md", "--graph", str(files / "p5.txt"), "--node-cap", "1000")
    assert code == 0


def test_verify(capsys, files):
    code, rec = run(capsys, "verify", "--graph", str(files / "p5.txt"), "--set", "1")
    assert code == 0 and rec["outcome"]["verified"]
    code, rec = run(capsys, "verify", "--graph", str(files / "k3.txt"), "--set", "1")
    assert code == 1 and rec["outcome"]["witness_pair"] == [2, 3]
    code, rec = run(capsys, "verify", "--graph", str(files / "k3.txt"), "--set", "7")
    assert code == 2


def test_kernelize(capsys, files):
    code, rec = run(capsys, "kernelize", "--graph", str(files / "k3.txt"), "--k", "0")
    assert code == 0 and rec["outcome"]["outcome"] == "TRIVIAL_NO"
    out = files / "ker"
    code, rec = run(capsys, "kernelize", "--graph", str(files / "planted.txt"), "--k", "20",
                    "--modulator", "1", "--out-dir", str(out))
    assert code == 0
    steps = rec["outcome"]["trace"]["steps"]
    assert [s["rule"] for s in steps] == ["RR3"] * 3
    assert steps[0]["removed"] == [2, 3]
    assert (out / "trace.json").exists() and (out / "graph.txt").read_text().startswith("p graph 21 30")
    code, rec = run(capsys, "kernelize", "--graph", str(files / "planted.txt"), "--k", "20",
                    "--mode", "co-cluster", "--modulator-budget", "0")
    assert code == 2


def test_modulator(capsys, files):
    code, rec = run(capsys, "modulator", "--graph", str(files / "p5.txt"), "--budget", "1")
    assert rec["outcome"] == {"found": True, "size": 1, "vertices": [3]}
    code, rec = run(capsys, "modulator", "--graph", str(files / "p5.txt"), "--budget", "0")
    assert code == 0 and rec["outcome"]["found"] is False


def test_gen_and_check(capsys, files):
    for kind, key in (("sat-vc", "vc_witness"), ("sat-clique", "clique_modulator")):
        code, rec = run(capsys, "gen", kind, "--cnf", str(files / "f.cnf"), "--out-dir", str(files / kind))
        assert code == 0
        meta = json.loads((files / kind / "meta.json").read_text())
        assert meta["k"] == 7 and key in meta and len(meta["input_sha256"]) == 64
    code, rec = run(capsys, "gen", "nae", "--in", str(files / "inst.json"), "--out-dir", str(files / "n"))
    meta = json.loads((files / "n" / "meta.json").read_text())
    assert meta["k"] == 14 and len(meta["fvs_witness"]) == 7
    code, rec = run(capsys, "check", "claims-nae", "--in", str(files / "inst.json"))
    assert code == 0 and rec["outcome"]["mismatches"] == []
    code, rec = run(capsys, "check", "table1", "--cnf", str(files / "f.cnf"), "--variant", "clique")
    assert code == 0 and rec["outcome"]["checked"] > 0


def test_xval(capsys, tmp_path):
    code, rec = run(capsys, "xval", "sat", "--n", "1", "--m-max", "2", "--samples", "20", "--seed", "7",
                    "--failure-dir", str(tmp_path))
    assert code == 0 and rec["outcome"]["summary"]["all_passed"] and rec["seed"] == 7
    code, rec = run(capsys, "xval", "nae", "--d", "2", "--vars", "3", "--clauses", "1", "--samples", "3",
                    "--seed", "1", "--failure-dir", str(tmp_path))
    assert code == 0 and rec["outcome"]["summary"]["samples"] == 3
    code, rec = run(capsys, "xval", "kernel", "--planted-x", "1", "--samples", "3", "--seed", "2",
                    "--mode", "co-cluster", "--failure-dir", str(tmp_path))
    assert code == 0
    code, rec = run(capsys, "xval", "nae", "--d", "2", "--vars", "4", "--clauses", "1", "--samples", "1",
                    "--seed", "1", "--failure-dir", str(tmp_path))
    assert code == 2


def test_records_are_deterministic_apart_from_wall_time(capsys, tmp_path):
    argv = ["xval", "kernel", "--planted-x", "0", "--samples", "3", "--seed", "5", "--failure-dir", str(tmp_path)]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b


def test_usage_errors(capsys, files):
    code, rec = run(capsys, "bogus")
    assert code == 2 and "error" in rec["outcome"]
    code, rec = run(capsys, "md", "--graph", str(files / "missing.txt"))
    assert code == 2
    (files / "bad.txt").write_text("p graph 2 2\ne 1 2\n")
    code, rec = run(capsys, "md", "--graph", str(files / "bad.txt"))
    assert code == 2 and "mismatch" in rec["outcome"]["error"]


def test_out_flag_and_module_entry(files):
    out = files / "rec.json"
    proc = subprocess.run(
        [sys.executable, "-m", "mdkit", "--out", str(out), "md", "--graph", str(files / "p5.txt")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == ""
    assert json.loads(out.read_text())["outcome"]["value"] == 1
