"""Seeded samplers and cross-validation drivers.

All randomness comes from ``random.Random(seed)`` (Mersenne Twister), so a
seed reproduces the same sample stream on any platform and Python version
that keeps that generator stable.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from mdkit import formats
from mdkit.graph import Graph, all_pairs_distances, complement, from_edges
from mdkit.kernel import (
    Mode,
    Modulator,
    Outcome,
    apply_rr2,
    apply_rr3,
    apply_rr4,
    clone_distance_violations,
    kernelize,
    replay_trace,
    threshold,
)
from mdkit.nae import (
    NaeError,
    NaeInstance,
    build_nae_gadget,
    check_distance_claims,
    fvs_witness,
    nae_brute_force,
    resolving_set_from_assignment,
    reverse_candidate_sweep,
    twin_swap_spot_check,
)
from mdkit.resolve import SolverBudgetExceeded, Status, metric_dimension_exact
from mdkit.sat import (
    CnfFormula,
    build_clique_gadget,
    build_vc_gadget,
    clique_modulator_witness,
    sat_brute_force,
    vc_witness,
)

DEFAULT_NODE_CAP = 10**8
SWEEP_CAP = 10**4


def default_node_cap() -> int:
    raw = os.environ.get("MDKIT_NODE_CAP")
    if raw is None:
        return DEFAULT_NODE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"MDKIT_NODE_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError("MDKIT_NODE_CAP must be positive")
    return cap


@dataclass
class XvalReport:
    records: list[dict]
    indeterminate: int = 0

    @property
    def failures(self) -> int:
        return sum(1 for r in self.records if r["verdict"] == "FAIL")

    def summary(self) -> dict:
        return {
            "samples": len(self.records),
            "failures": self.failures,
            "indeterminate": self.indeterminate,
            "all_passed": self.failures == 0 and self.indeterminate == 0,
        }


def _save_failure(failure_dir: Path | None, name: str, g: Graph, meta: dict) -> str | None:
    if failure_dir is None:
        return None
    return formats.write_bundle(failure_dir / name, g, meta)["meta"]


# --------------------------------------------------------------------------
# SAT reduction


def random_cnf(rng: random.Random, n: int, m_max: int) -> CnfFormula:
    m = rng.randint(1, m_max)
    clauses = []
    for _ in range(m):
        width = rng.randint(1, n)
        vs = rng.sample(range(1, n + 1), width)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return CnfFormula.from_clauses(n, clauses)


def all_ordered_cnfs(n: int, m_max: int) -> Iterator[CnfFormula]:
    """Every formula on exactly n variables with 1..m_max distinct clauses, in every clause order."""
    lits = []
    for signs in itertools.product((0, 1, -1), repeat=n):
        clause = tuple(s * (i + 1) for i, s in enumerate(signs) if s)
        if clause:
            lits.append(clause)
    lits.sort(key=lambda c: (len(c), [abs(x) for x in c], c))
    for m in range(1, m_max + 1):
        for order in itertools.permutations(lits, m):
            yield CnfFormula.from_clauses(n, order)


def sat_decision(f: CnfFormula, variant: str, node_cap: int | None = None) -> dict:
    """Compare brute-force satisfiability with MD(G) <= k on the gadget."""
    art = build_vc_gadget(f) if variant == "vc" else build_clique_gadget(f)
    witness = vc_witness(art) if variant == "vc" else clique_modulator_witness(art)
    sat = sat_brute_force(f) is not None
    rec = {
        "clauses": [list(c) for c in f.clauses],
        "n": f.n,
        "variant": variant,
        "vertices": art.graph.n,
        "k": art.k,
        "witness_size": len(witness),
        "satisfiable": sat,
    }
    try:
        res = metric_dimension_exact(art.graph, bound=art.k, node_cap=node_cap)
    except SolverBudgetExceeded as exc:
        rec.update(md_status="INDETERMINATE", md_value=None, explored_nodes=exc.explored, verdict="INDETERMINATE")
        return rec
    decided = res.status is Status.EXACT and res.value <= art.k
    rec.update(md_status=res.status.value, md_value=res.value, explored_nodes=res.explored_nodes)
    rec["verdict"] = "PASS" if decided == sat else "FAIL"
    return rec


def xval_sat(
    n: int,
    m_max: int,
    samples: int,
    seed: int,
    variant: str = "vc",
    node_cap: int | None = None,
    failure_dir: Path | None = None,
) -> XvalReport:
    rng = random.Random(seed)
    report = XvalReport([])
    for i in range(samples):
        f = random_cnf(rng, n, m_max)
        rec = {"index": i, **sat_decision(f, variant, node_cap)}
        if rec["verdict"] == "INDETERMINATE":
            report.indeterminate += 1
        if rec["verdict"] == "FAIL":
            art = build_vc_gadget(f) if variant == "vc" else build_clique_gadget(f)
            rec["bundle"] = _save_failure(failure_dir, f"sat-{variant}-{i}", art.graph,
                                          {"cnf": f.to_dimacs(), "k": art.k, "seed": seed, "index": i})
        report.records.append(rec)
    return report


# --------------------------------------------------------------------------
# NAE reduction


def random_nae(
    rng: random.Random, d: int, var_count: int, m: int, every_variable_used: bool = True
) -> NaeInstance:
    """Random instance; by default every variable occurs in some clause."""
    if var_count < 3:
        raise NaeError("clauses need three distinct variables")
    if every_variable_used and var_count > 3 * m:
        raise NaeError(f"{m} clause(s) cannot mention all {var_count} variables")
    while True:
        clauses = [[(x, rng.randint(1, d)) for x in rng.sample(range(var_count), 3)] for _ in range(m)]
        inst = NaeInstance.create(d, var_count, clauses)
        if not every_variable_used or not inst.unused_variables():
            return inst


def nae_check(inst: NaeInstance, sweep_cap: int = SWEEP_CAP) -> dict:
    art = build_nae_gadget(inst)
    dm = all_pairs_distances(art.graph)
    claims = check_distance_claims(art, dist=dm)
    fvs = fvs_witness(art)
    phi = nae_brute_force(inst)
    rec: dict = {
        "instance": formats.nae_record(inst),
        "vertices": art.graph.n,
        "k": art.k,
        "fvs_size": len(fvs),
        "claims_checked": len(claims.entries),
        "claim_mismatches": len(claims.mismatches),
        "satisfiable": phi is not None,
    }
    ok = claims.ok and len(fvs) == 2 * inst.var_count + 1
    if phi is not None:
        cert = resolving_set_from_assignment(art, inst, phi, dm)
        rec["constructive"] = {"assignment": list(phi), "verified": cert.verified, "size": len(cert.vertices)}
        ok &= cert.verified and len(cert.vertices) == art.k
    if (2 * inst.d) ** inst.var_count <= sweep_cap:
        sweep = reverse_candidate_sweep(art, inst, sweep_cap, dm)
        rec["sweep"] = {
            "candidates": sweep.candidates,
            "resolving": len(sweep.resolving),
            "induced_all_satisfying": sweep.induced_all_satisfying,
        }
        ok &= sweep.induced_all_satisfying
        if phi is None:
            ok &= not sweep.resolving
        else:
            ok &= bool(sweep.resolving)
            if sweep.resolving:
                swap = twin_swap_spot_check(art, sweep.resolving[0], dm)
                rec["sweep"]["twin_swap_consistent"] = swap
                ok &= swap
    else:
        rec["sweep"] = None
    rec["verdict"] = "PASS" if ok else "FAIL"
    return rec


def xval_nae(
    d: int, var_count: int, clauses: int, samples: int, seed: int, failure_dir: Path | None = None
) -> XvalReport:
    rng = random.Random(seed)
    report = XvalReport([])
    for i in range(samples):
        inst = random_nae(rng, d, var_count, clauses)
        rec = {"index": i, **nae_check(inst)}
        if rec["verdict"] == "FAIL":
            art = build_nae_gadget(inst)
            rec["bundle"] = _save_failure(failure_dir, f"nae-{i}", art.graph,
                                          {"instance": formats.nae_record(inst), "k": art.k, "seed": seed})
        report.records.append(rec)
    return report


# --------------------------------------------------------------------------
# kernel


# A template lists, per vertex of a planted clique, whether it sees the
# single modulator vertex.  t(template) = number of duplicated flags.
TEMPLATES_X1 = [(1, 0), (1, 1), (0, 0), (1, 1, 0), (1, 0, 0)]
NOISE_X1 = [(1,), (0,), (1, 0), (1, 1), (0, 0)]


@dataclass(frozen=True)
class PlantedInstance:
    graph: Graph
    modulator: Modulator
    template: tuple[int, ...]
    copies: int
    noise: tuple[tuple[int, ...], ...]

    def to_record(self) -> dict:
        return {
            "template": list(self.template),
            "copies": self.copies,
            "noise": [list(t) for t in self.noise],
            "modulator": list(self.modulator.vertices),
            "vertices": self.graph.n,
        }


def planted_graph(x_size: int, blocks: list[tuple[int, ...]]) -> Graph:
    edges = []
    n = x_size
    for tpl in blocks:
        ids = list(range(n, n + len(tpl)))
        n += len(tpl)
        edges += list(itertools.combinations(ids, 2))
        edges += [(0, v) for v, seen in zip(ids, tpl) if seen]
    return from_edges(n, edges)


def planted_instance(
    rng: random.Random, x_size: int, mode: Mode | str = Mode.CLUSTER, max_vertices: int = 40
) -> PlantedInstance:
    """Cliques sharing one signature, one to three more than the RR3 threshold needs, plus noise."""
    mode = Mode(mode)
    if x_size == 1:
        template = rng.choice(TEMPLATES_X1)
        pool = [t for t in NOISE_X1 if t != template]
        noise = rng.sample(pool, rng.randint(0, 2))
    elif x_size == 0:
        template = (0, 0)
        noise = rng.sample([(0,)], rng.randint(0, 1))
    else:
        raise ValueError("planted instances support |X| in {0, 1}")
    room = max_vertices - x_size - sum(len(t) for t in noise)
    low = threshold(x_size)
    high = min(low + 2, room // len(template))
    if high < low:
        raise ValueError("vertex budget too small for a planted class")
    copies = rng.randint(low, high)
    blocks = [template] * copies + list(noise)
    order = list(range(len(blocks)))
    rng.shuffle(order)
    g = planted_graph(x_size, [blocks[i] for i in order])
    if mode is Mode.CO_CLUSTER:
        g = complement(g)
    return PlantedInstance(g, Modulator.of(range(x_size), mode), template, copies, tuple(noise))


def twin_triple_graph(rng: random.Random, max_vertices: int = 14) -> Graph:
    """Random connected graph plus two twins of one vertex (true or false)."""
    base = rng.randint(3, max_vertices - 2)
    edges = [(rng.randrange(v), v) for v in range(1, base)]
    for u, v in itertools.combinations(range(base), 2):
        if rng.random() < 0.25:
            edges.append((u, v))
    g0 = from_edges(base, edges)
    v = rng.randrange(base)
    true_twins = rng.random() < 0.5
    copies = [base, base + 1]
    new = list(g0.edges())
    for c in copies:
        new += [(w, c) for w in g0.adjacency[v]]
        if true_twins:
            new.append((v, c))
    if true_twins:
        new.append((copies[0], copies[1]))
    return from_edges(base + 2, new)


def _decision_agreement(before: int, after: int, decrement: int, n: int) -> list[int]:
    """Values of k in [0, n] where MD(G) <= k and MD(G') <= k - decrement disagree."""
    return [k for k in range(n + 1) if (before <= k) != (after <= k - decrement)]


def rr2_safeness(g: Graph, node_cap: int | None = None) -> dict:
    res = apply_rr2(g, g.n)
    rec: dict = {"vertices": g.n, "edges": g.m, "applied": res.outcome is Outcome.APPLIED}
    if not rec["applied"]:
        rec["verdict"] = "FAIL"
        return rec
    a = metric_dimension_exact(g, node_cap=node_cap).value
    b = metric_dimension_exact(res.graph, node_cap=node_cap).value
    bad = _decision_agreement(a, b, 1, g.n)
    rec.update(removed=list(res.removed), md_before=a, md_after=b, disagreeing_k=bad)
    rec["verdict"] = "PASS" if not bad else "FAIL"
    return rec


def part_rule_safeness(p: PlantedInstance, node_cap: int | None = None) -> dict:
    g, x = p.graph, p.modulator
    rec: dict = {"planted": p.to_record()}
    dm = all_pairs_distances(g)
    clones = clone_distance_violations(g, x, dm)
    rec["clone_violations"] = len(clones)
    if apply_rr2(g, g.n, x.mode).outcome is Outcome.APPLIED:
        rec["verdict"] = "FAIL"
        rec["error"] = "planted instance has a twin triple"
        return rec
    rule = apply_rr3 if x.mode is Mode.CLUSTER else apply_rr4
    res = rule(g, g.n, x)
    rec["rule"] = res.rule
    rec["applied"] = res.outcome is Outcome.APPLIED
    ok = rec["applied"] and not clones
    if rec["applied"]:
        a = metric_dimension_exact(g, node_cap=node_cap, dist=dm).value
        b = metric_dimension_exact(res.graph, node_cap=node_cap).value
        bad = _decision_agreement(a, b, res.decrement, g.n)
        rec.update(removed=list(res.removed), decrement=res.decrement, md_before=a, md_after=b,
                   disagreeing_k=bad)
        ok &= not bad
    ker = kernelize(g, g.n, x)
    replayed, _ = replay_trace(g, ker.trace)
    rec["kernel"] = {
        "vertices": ker.graph.n,
        "bound": ker.size_bound,
        "steps": [s.rule for s in ker.trace.steps],
        "replay_identical": formats.write_graph(replayed) == formats.write_graph(ker.graph),
    }
    ok &= ker.graph.n <= ker.size_bound and rec["kernel"]["replay_identical"]
    rec["verdict"] = "PASS" if ok else "FAIL"
    return rec


def xval_kernel(
    planted_x: int,
    samples: int,
    seed: int,
    mode: Mode | str = Mode.CLUSTER,
    node_cap: int | None = None,
    failure_dir: Path | None = None,
) -> XvalReport:
    rng = random.Random(seed)
    report = XvalReport([])
    for i in range(samples):
        p = planted_instance(rng, planted_x, mode)
        try:
            rec = {"index": i, **part_rule_safeness(p, node_cap)}
        except SolverBudgetExceeded as exc:
            report.indeterminate += 1
            rec = {"index": i, "planted": p.to_record(), "verdict": "INDETERMINATE", "explored_nodes": exc.explored}
        if rec["verdict"] == "FAIL":
            rec["bundle"] = _save_failure(failure_dir, f"kernel-{i}", p.graph,
                                          {"planted": p.to_record(), "seed": seed, "index": i})
        report.records.append(rec)
    return report

