from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdkit.formats import write_graph
from mdkit.graph import (
    complement,
    complete_graph,
    cycle_graph,
    empty_graph,
    from_edges,
    induced_p3s,
    path_graph,
    remove_vertices,
    star_graph,
)
from mdkit.harness import planted_graph, planted_instance
from mdkit.kernel import (
    KernelError,
    KernelTrace,
    Mode,
    Modulator,
    Outcome,
    apply_rr1,
    apply_rr2,
    apply_rr3,
    apply_rr4,
    classify,
    clone_distance_violations,
    clone_of,
    find_modulator,
    kernel_size_bound,
    kernelize,
    replay_trace,
    threshold,
)

from oracles import is_cluster, min_cluster_modulator

X1 = Modulator.of([0], Mode.CLUSTER)
X0 = Modulator.of([], Mode.CLUSTER)


def disjoint_k2(q: int):
    return from_edges(2 * q, [(2 * i, 2 * i + 1) for i in range(q)])


# ---------------------------------------------------------------- modulators


def test_find_modulator_examples():
    assert find_modulator(disjoint_k2(3), 0) == X0
    p3 = find_modulator(path_graph(3), 1)
    assert len(p3.vertices) == 1
    assert find_modulator(cycle_graph(5), 1) is None
    c5 = find_modulator(cycle_graph(5), 2)
    assert len(c5.vertices) == 2 == min_cluster_modulator(5, cycle_graph(5).edges())


@st.composite
def small_graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return from_edges(n, edges)


@settings(max_examples=100, deadline=None)
@given(small_graphs())
def test_find_modulator_is_minimum(g):
    x = find_modulator(g, g.n)
    assert len(x.vertices) == min_cluster_modulator(g.n, g.edges())
    assert is_cluster(g.n, g.edges(), set(range(g.n)) - set(x.vertices))


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_co_cluster_modulator(g):
    x = find_modulator(g, g.n, Mode.CO_CLUSTER)
    rest, _ = remove_vertices(complement(g), x.vertices)
    assert induced_p3s(rest) == []


def test_find_modulator_negative_budget():
    with pytest.raises(KernelError):
        find_modulator(path_graph(2), -1)


# ---------------------------------------------------------------- classes


def test_classify_examples():
    (cls,) = classify(disjoint_k2(3), X0)
    assert len(cls) == 3 and cls.twin_pair_count == 1
    g = from_edges(4, [(0, 1), (0, 2)])
    classes = classify(g, X1)
    assert len(classes) == 2
    assert [c.signature for c in classes] == [((),), ((0,),)]
    tri = planted_graph(1, [(1, 1, 0)] * 11)
    (big,) = classify(tri, X1)
    assert len(big) == 11 and big.twin_pair_count == 1
    nbhd = {tuple(sorted(w for w in tri.neighbors(v) if w == 0)) for part in big.cliques for v in part}
    assert nbhd == {(), (0,)}


def test_classify_rejects_invalid_modulator_and_unreduced_parts():
    with pytest.raises(KernelError, match="not a clique"):
        classify(path_graph(3), X0)
    with pytest.raises(KernelError, match="exhaust RR2"):
        classify(complete_graph(3), X0)
    with pytest.raises(KernelError):
        classify(path_graph(3), Modulator.of([5], Mode.CLUSTER))


def test_every_part_has_2t_twinned_vertices():
    rng = random.Random(8)
    for _ in range(20):
        p = planted_instance(rng, 1)
        for cls in classify(p.graph, p.modulator):
            for part in cls.cliques:
                twinned = [v for v in part if len(clone_of([cls], v, part)) == 2]
                assert len(twinned) == 2 * cls.twin_pair_count
                assert len(part) <= 2 ** (len(p.modulator.vertices) + 1)


def test_clone_of_examples():
    two = empty_graph(2)
    classes = classify(two, X0)
    assert clone_of(classes, 0, (1,)) == [1]
    tri = planted_graph(1, [(1, 1, 0)] * 2)
    classes = classify(tri, X1)
    assert clone_of(classes, 1, (4, 5, 6)) == [4, 5]
    assert clone_of(classes, 3, (4, 5, 6)) == [6]
    mixed = planted_graph(1, [(1, 0), (1,)])
    with pytest.raises(KernelError):
        clone_of(classify(mixed, X1), 1, (3,))


def test_clone_distances_on_planted_instances():
    rng = random.Random(9)
    for mode in Mode:
        for x_size in (0, 1):
            for _ in range(6):
                p = planted_instance(rng, x_size, mode)
                assert clone_distance_violations(p.graph, p.modulator) == []


# ---------------------------------------------------------------- rules


def test_rr1_examples():
    assert apply_rr1(complete_graph(3), 0).outcome is Outcome.TRIVIAL_NO
    assert apply_rr1(complete_graph(3), 2).outcome is Outcome.NOT_APPLICABLE
    assert apply_rr1(empty_graph(0), 0).outcome is Outcome.NOT_APPLICABLE


def test_rr2_examples():
    k4 = apply_rr2(complete_graph(4), 4)
    assert k4.outcome is Outcome.APPLIED and k4.k == 3 and k4.graph.edges() == complete_graph(3).edges()
    assert k4.removed == (3,)
    assert apply_rr2(cycle_graph(6), 3).outcome is Outcome.NOT_APPLICABLE
    star = apply_rr2(star_graph(4), 3)
    assert star.k == 2 and star.graph.edges() == star_graph(3).edges()
    assert apply_rr2(star_graph(4), 3, Mode.CO_CLUSTER).k == 2


def test_threshold_values():
    assert threshold(1) == 11 and threshold(0) == 6
    assert kernel_size_bound(0) == 4 * 5 * 2


def test_rr3_examples():
    eleven = planted_graph(1, [(1, 0)] * 11)
    res = apply_rr3(eleven, 20, X1)
    assert res.outcome is Outcome.APPLIED and res.k == 19 and res.removed == (1, 2)
    ten = planted_graph(1, [(1, 0)] * 10)
    assert apply_rr3(ten, 20, X1).outcome is Outcome.NOT_APPLICABLE
    six = apply_rr3(disjoint_k2(6), 9, X0)
    assert six.k == 8 and six.decrement == 1
    with pytest.raises(KernelError):
        apply_rr3(eleven, 20, Modulator.of([0], Mode.CO_CLUSTER))


def test_rr3_decrement_equals_twin_pair_count():
    g = planted_graph(1, [(1, 1, 0, 0)] * 11)
    res = apply_rr3(g, 30, X1)
    assert res.decrement == 2 and res.k == 28


def test_rr4_examples():
    co = Modulator.of([0], Mode.CO_CLUSTER)
    eleven = planted_graph(1, [(1, 0)] * 11)
    a = apply_rr3(eleven, 20, X1)
    b = apply_rr4(complement(eleven), 20, co)
    assert (a.decrement, a.removed) == (b.decrement, b.removed)
    ten = complement(planted_graph(1, [(1, 0)] * 10))
    assert apply_rr4(ten, 20, co).outcome is Outcome.NOT_APPLICABLE
    multipartite = complement(disjoint_k2(6))
    res = apply_rr4(multipartite, 9, Modulator.of([], Mode.CO_CLUSTER))
    assert res.k == 8
    with pytest.raises(KernelError):
        apply_rr4(eleven, 20, X1)


# ---------------------------------------------------------------- driver


def test_kernelize_examples():
    small = disjoint_k2(3)
    res = kernelize(small, 5, X0)
    assert res.outcome == "KERNEL" and res.graph == small and res.trace.steps == ()
    thirteen = planted_graph(1, [(1, 0)] * 13)
    res = kernelize(thirteen, 20, X1)
    assert [s.rule for s in res.trace.steps] == ["RR3"] * 3
    assert res.k == 17 and res.graph.n == 1 + 2 * 10
    triv = kernelize(complete_graph(3), 0)
    assert triv.outcome == "TRIVIAL_NO"


def test_kernelize_without_modulator_searches():
    res = kernelize(planted_graph(1, [(1, 0)] * 12), 20)
    assert res.modulator.vertices == (0,)
    with pytest.raises(KernelError, match="no CLUSTER modulator"):
        kernelize(cycle_graph(9), 5, budget=1)


def test_kernelize_rr1_after_decrements():
    res = kernelize(complete_graph(6), 2)
    assert res.outcome == "TRIVIAL_NO"
    assert [s.rule for s in res.trace.steps] == ["RR2", "RR2", "RR1"]


def test_x_vertex_removed_by_rr2_shrinks_modulator():
    g = complete_graph(4)
    res = kernelize(g, 5, Modulator.of([3], Mode.CLUSTER))
    assert res.modulator.vertices == ()
    assert res.graph.n == 2


def _trace_ok(trace: KernelTrace) -> bool:
    total = sum(s.decrement for s in trace.steps)
    rr2 = all(s.decrement == 1 for s in trace.steps if s.rule == "RR2")
    return trace.final_k == trace.initial_k - total and rr2


@pytest.mark.parametrize("mode", list(Mode))
def test_trace_invariants_replay_and_bound(mode):
    rng = random.Random(12)
    for _ in range(15):
        p = planted_instance(rng, rng.randint(0, 1), mode)
        res = kernelize(p.graph, p.graph.n, p.modulator)
        assert _trace_ok(res.trace)
        assert res.graph.n <= kernel_size_bound(len(res.modulator.vertices))
        replayed, k = replay_trace(p.graph, res.trace)
        assert write_graph(replayed) == write_graph(res.graph) and k == res.k
        assert KernelTrace.from_record(res.trace.to_record()) == res.trace
        for cls in classify(res.graph, res.modulator):
            assert len(cls) < threshold(len(res.modulator.vertices))


def test_replay_rejects_bad_trace():
    g = complete_graph(4)
    res = kernelize(g, 5)
    bad = KernelTrace(res.trace.mode, res.trace.initial_k, res.trace.final_k + 1, res.trace.steps)
    with pytest.raises(KernelError):
        replay_trace(g, bad)
