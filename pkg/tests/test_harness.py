from __future__ import annotations

import json
import random

import pytest

from mdkit.graph import twins
from mdkit.harness import (
    XvalReport,
    all_ordered_cnfs,
    default_node_cap,
    planted_instance,
    random_nae,
    twin_triple_graph,
    xval_kernel,
    xval_nae,
    xval_sat,
)
from mdkit.kernel import Mode, threshold
from mdkit.nae import NaeError


def test_default_node_cap(monkeypatch):
    monkeypatch.delenv("MDKIT_NODE_CAP", raising=False)
    assert default_node_cap() == 10**8
    monkeypatch.setenv("MDKIT_NODE_CAP", "5")
    assert default_node_cap() == 5
    for bad in ("x", "0"):
        monkeypatch.setenv("MDKIT_NODE_CAP", bad)
        with pytest.raises(ValueError):
            default_node_cap()


def test_ordered_corpus_size():
    assert sum(1 for _ in all_ordered_cnfs(1, 3)) == 2 + 2
    assert sum(1 for _ in all_ordered_cnfs(2, 3)) == 8 + 8 * 7 + 8 * 7 * 6


def test_random_nae_uses_every_variable():
    rng = random.Random(1)
    for _ in range(20):
        assert random_nae(rng, 2, 6, 2).unused_variables() == []
    with pytest.raises(NaeError):
        random_nae(rng, 2, 4, 1)
    assert random_nae(rng, 2, 4, 1, every_variable_used=False).var_count == 4


def test_generators_are_seeded():
    a = [twin_triple_graph(random.Random(s)) for s in range(5)]
    b = [twin_triple_graph(random.Random(s)) for s in range(5)]
    assert a == b
    for g in a:
        assert g.n <= 14 and twins(g).all_pairs()
    for mode in Mode:
        p = planted_instance(random.Random(0), 1, mode)
        assert threshold(1) <= p.copies <= threshold(1) + 2 and p.graph.n <= 40


def test_report_summary():
    rep = XvalReport([{"verdict": "PASS"}, {"verdict": "FAIL"}], indeterminate=1)
    assert rep.summary() == {"samples": 2, "failures": 1, "indeterminate": 1, "all_passed": False}


def test_xval_runs_pass(tmp_path):
    assert xval_sat(2, 3, 10, 1, "clique").summary()["all_passed"]
    assert xval_nae(2, 3, 1, 2, 1).summary()["all_passed"]
    assert xval_kernel(1, 3, 1, Mode.CO_CLUSTER, failure_dir=tmp_path).summary()["all_passed"]
    assert list(tmp_path.iterdir()) == []


def test_indeterminate_runs_are_counted():
    rep = xval_sat(2, 3, 6, 4, node_cap=1)
    stuck = sum(1 for r in rep.records if r["verdict"] == "INDETERMINATE")
    assert rep.indeterminate == stuck >= 1 and not rep.summary()["all_passed"]
    ker = xval_kernel(1, 2, 3, node_cap=1)
    assert ker.indeterminate == sum(1 for r in ker.records if r["verdict"] == "INDETERMINATE") >= 1


def test_failure_bundle_written(tmp_path, monkeypatch):
    import mdkit.harness as h

    monkeypatch.setattr(h, "nae_check", lambda inst: {"verdict": "FAIL"})
    rep = xval_nae(2, 3, 1, 1, 9, failure_dir=tmp_path)
    meta = json.loads((tmp_path / "nae-0" / "meta.json").read_text())
    assert meta["seed"] == 9 and rep.failures == 1
    assert (tmp_path / "nae-0" / "graph.txt").read_text().startswith("p graph 144")
