"""Kernelization for metric dimension parameterized by distance to cluster / co-cluster.

With a modulator X, every component of G - X is a clique (CLUSTER) or every
component of the complement of G - X is an independent set (CO_CLUSTER).
We call these components the *parts*.  The rules:

    RR1  V nonempty and k <= 0: trivial no-instance
    RR2  three mutual twins (true or false): drop one, k -= 1
    RR3  a class of parts with equal signature has at least
         2^(|X|+2) + |X| + 2 members: drop one part, k -= max(1, t)
    RR4  the co-cluster counterpart of RR3

The signature of a part is the sorted multiset of the X-neighbourhoods of its
vertices, and t is the number of neighbourhoods occurring twice in it.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from mdkit.graph import (
    DistanceMatrix,
    Graph,
    all_pairs_distances,
    complement,
    connected_components,
    is_clique,
    is_independent,
    remove_vertices,
    twin_classes,
)


class KernelError(ValueError):
    pass


class Mode(str, enum.Enum):
    CLUSTER = "CLUSTER"
    CO_CLUSTER = "CO_CLUSTER"


@dataclass(frozen=True)
class Modulator:
    vertices: tuple[int, ...]
    mode: Mode

    @classmethod
    def of(cls, vertices: Iterable[int], mode: Mode | str) -> "Modulator":
        return cls(tuple(sorted(set(vertices))), Mode(mode))


def threshold(xsize: int) -> int:
    return 2 ** (xsize + 2) + xsize + 2


def kernel_size_bound(xsize: int) -> int:
    return 2 ** (2 ** (xsize + 1)) * (2 ** (xsize + 2) + xsize + 1) * 2 ** (xsize + 1) + xsize


# --------------------------------------------------------------------------
# modulators


def _find_p3(h: Graph, alive: set[int]) -> tuple[int, int, int] | None:
    for b in sorted(alive):
        nb = [a for a in h.adjacency[b] if a in alive]
        for i, a in enumerate(nb):
            na = h.neighbor_set(a)
            for c in nb[i + 1:]:
                if c not in na:
                    return a, b, c
    return None


def _search_hitting(h: Graph, alive: set[int], budget: int) -> list[int] | None:
    p3 = _find_p3(h, alive)
    if p3 is None:
        return []
    if budget == 0:
        return None
    for v in p3:
        alive.discard(v)
        found = _search_hitting(h, alive, budget - 1)
        alive.add(v)
        if found is not None:
            return [v] + found
    return None


def find_modulator(g: Graph, budget: int = 10, mode: Mode | str = Mode.CLUSTER) -> Modulator | None:
    """Smallest modulator of size <= budget (None if there is none)."""
    if budget < 0:
        raise KernelError("budget must be non-negative")
    mode = Mode(mode)
    h = g if mode is Mode.CLUSTER else complement(g)
    for size in range(budget + 1):
        found = _search_hitting(h, set(range(g.n)), size)
        if found is not None:
            return Modulator.of(found, mode)
    return None


def parts(g: Graph, x: Modulator) -> list[tuple[int, ...]]:
    """Cliques (or independent sets) of G - X, ordered by smallest member."""
    xs = set(x.vertices)
    for v in xs:
        if not 0 <= v < g.n:
            raise KernelError(f"modulator vertex {v} is not in the graph")
    rest = [v for v in range(g.n) if v not in xs]
    if x.mode is Mode.CLUSTER:
        comps = connected_components(g, rest)
        for comp in comps:
            if not is_clique(g, comp):
                raise KernelError(f"component {comp} of G - X is not a clique")
    else:
        comps = connected_components(complement(g), rest)
        for comp in comps:
            if not is_independent(g, comp):
                raise KernelError(f"co-component {comp} of G - X is not independent")
    return [tuple(c) for c in comps]


def check_modulator(g: Graph, x: Modulator) -> None:
    parts(g, x)


# --------------------------------------------------------------------------
# signatures and classes

Neighbourhood = tuple[int, ...]
Signature = tuple[Neighbourhood, ...]


@dataclass(frozen=True)
class EquivalenceClass:
    signature: Signature
    cliques: tuple[tuple[int, ...], ...]
    twin_pair_count: int
    x_neighbourhood: dict[int, Neighbourhood] = field(compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.cliques)


def _x_neighbourhood(g: Graph, v: int, xs: set[int]) -> Neighbourhood:
    return tuple(sorted(w for w in g.adjacency[v] if w in xs))


def classify(g: Graph, x: Modulator) -> list[EquivalenceClass]:
    xs = set(x.vertices)
    groups: dict[Signature, list[tuple[int, ...]]] = {}
    nbhd: dict[int, Neighbourhood] = {}
    for part in parts(g, x):
        entries = []
        for v in part:
            nbhd[v] = _x_neighbourhood(g, v, xs)
            entries.append(nbhd[v])
        sig = tuple(sorted(entries))
        for key, grp in itertools.groupby(sig):
            if len(list(grp)) > 2:
                raise KernelError(
                    f"part {part} has three vertices with X-neighbourhood {list(key)}; exhaust RR2 first"
                )
        groups.setdefault(sig, []).append(part)
    out = []
    for sig in sorted(groups):
        twins_in = sum(1 for _, grp in itertools.groupby(sig) if len(list(grp)) == 2)
        members = tuple(sorted(groups[sig]))
        local = {v: nbhd[v] for part in members for v in part}
        out.append(EquivalenceClass(sig, members, twins_in, local))
    return out


def clone_of(classes: Sequence[EquivalenceClass], u: int, target: Sequence[int]) -> list[int]:
    """c(u, C2): vertices of ``target`` with the same X-neighbourhood as u."""
    target = tuple(sorted(target))
    for cls in classes:
        if u in cls.x_neighbourhood:
            if target not in cls.cliques:
                raise KernelError(f"vertex {u} and part {list(target)} are not in the same class")
            want = cls.x_neighbourhood[u]
            return [w for w in target if cls.x_neighbourhood[w] == want]
    raise KernelError(f"vertex {u} lies in no part")


def clone_distance_violations(g: Graph, x: Modulator, dist: DistanceMatrix | None = None) -> list[dict]:
    """Check, for every class and every ordered pair of its parts C1, C2:

    * clones u in C1, v in C2 satisfy d(u, w) = d(v, w) for all w outside C1 and C2;
    * d(u1, v2) = d(u2, v1) whenever u2 is a clone of u1 and v1 a clone of v2.
    """
    dm = (all_pairs_distances(g) if dist is None else dist).dist
    classes = classify(g, x)
    out: list[dict] = []
    for cls in classes:
        for c1, c2 in itertools.permutations(cls.cliques, 2):
            outside = [w for w in range(g.n) if w not in set(c1) | set(c2)]
            for u in c1:
                for v in clone_of(classes, u, c2):
                    bad = [w for w in outside if dm[u, w] != dm[v, w]]
                    if bad:
                        out.append({"kind": "clone", "u": u, "v": v, "w": bad[0]})
            for u1 in c1:
                for v2 in c2:
                    for u2 in clone_of(classes, u1, c2):
                        for v1 in clone_of(classes, v2, c1):
                            if dm[u1, v2] != dm[u2, v1]:
                                out.append({"kind": "cross", "u1": u1, "v2": v2, "u2": u2, "v1": v1})
    return out


# --------------------------------------------------------------------------
# rules


class Outcome(str, enum.Enum):
    APPLIED = "APPLIED"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    TRIVIAL_NO = "TRIVIAL_NO"


@dataclass(frozen=True)
class RuleResult:
    rule: str
    outcome: Outcome
    graph: Graph
    k: int
    removed: tuple[int, ...] = ()  # ids in the input graph
    decrement: int = 0
    remap: dict[int, int] | None = field(default=None, compare=False, repr=False)


def apply_rr1(g: Graph, k: int) -> RuleResult:
    if g.n > 0 and k <= 0:
        return RuleResult("RR1", Outcome.TRIVIAL_NO, g, k)
    return RuleResult("RR1", Outcome.NOT_APPLICABLE, g, k)


def twin_triple_victim(g: Graph) -> int | None:
    """Highest-id member of the first twin class (by smallest member) of size >= 3."""
    true_groups, false_groups = twin_classes(g)
    big = sorted(grp for grp in true_groups + false_groups if len(grp) >= 3)
    return max(big[0]) if big else None


def apply_rr2(g: Graph, k: int, mode: Mode | str = Mode.CLUSTER) -> RuleResult:
    # Both twin forms are reduced in either mode; safeness holds for each.
    Mode(mode)
    victim = twin_triple_victim(g)
    if victim is None:
        return RuleResult("RR2", Outcome.NOT_APPLICABLE, g, k)
    h, remap = remove_vertices(g, [victim])
    return RuleResult("RR2", Outcome.APPLIED, h, k - 1, (victim,), 1, remap)


def _apply_part_rule(rule: str, g: Graph, k: int, x: Modulator) -> RuleResult:
    classes = classify(g, x)
    limit = threshold(len(x.vertices))
    for cls in classes:
        if len(cls) >= limit:
            victim = cls.cliques[0]
            dec = max(1, cls.twin_pair_count)
            h, remap = remove_vertices(g, victim)
            return RuleResult(rule, Outcome.APPLIED, h, k - dec, tuple(victim), dec, remap)
    return RuleResult(rule, Outcome.NOT_APPLICABLE, g, k)


def apply_rr3(g: Graph, k: int, x: Modulator) -> RuleResult:
    if x.mode is not Mode.CLUSTER:
        raise KernelError("RR3 needs a cluster modulator")
    return _apply_part_rule("RR3", g, k, x)


def apply_rr4(g: Graph, k: int, x: Modulator) -> RuleResult:
    if x.mode is not Mode.CO_CLUSTER:
        raise KernelError("RR4 needs a co-cluster modulator")
    return _apply_part_rule("RR4", g, k, x)


# --------------------------------------------------------------------------
# driver


@dataclass(frozen=True)
class TraceStep:
    rule: str
    removed: tuple[int, ...]  # original ids
    decrement: int

    def to_record(self) -> dict:
        return {"rule": self.rule, "removed": list(self.removed), "decrement": self.decrement}


@dataclass(frozen=True)
class KernelTrace:
    mode: Mode
    initial_k: int
    final_k: int
    steps: tuple[TraceStep, ...]

    def to_record(self) -> dict:
        return {
            "mode": self.mode.value,
            "initial_k": self.initial_k,
            "final_k": self.final_k,
            "steps": [s.to_record() for s in self.steps],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "KernelTrace":
        steps = tuple(TraceStep(s["rule"], tuple(s["removed"]), int(s["decrement"])) for s in rec["steps"])
        return cls(Mode(rec["mode"]), int(rec["initial_k"]), int(rec["final_k"]), steps)


@dataclass(frozen=True)
class KernelResult:
    outcome: str  # "KERNEL" or "TRIVIAL_NO"
    graph: Graph
    k: int
    trace: KernelTrace
    modulator: Modulator  # in ids of the output graph
    original_ids: tuple[int, ...]  # output id -> input id

    @property
    def size_bound(self) -> int:
        return kernel_size_bound(len(self.modulator.vertices))


def kernelize(
    g: Graph,
    k: int,
    x: Modulator | None = None,
    mode: Mode | str = Mode.CLUSTER,
    budget: int = 10,
) -> KernelResult:
    mode = Mode(mode if x is None else x.mode)
    if x is None:
        x = find_modulator(g, budget, mode)
        if x is None:
            raise KernelError(f"no {mode.value} modulator of size <= {budget}")
    check_modulator(g, x)
    part_rule = apply_rr3 if mode is Mode.CLUSTER else apply_rr4
    orig = list(range(g.n))
    xs = list(x.vertices)
    steps: list[TraceStep] = []
    cur, kk = g, k
    outcome = "KERNEL"
    while True:
        if apply_rr1(cur, kk).outcome is Outcome.TRIVIAL_NO:
            steps.append(TraceStep("RR1", (), 0))
            outcome = "TRIVIAL_NO"
            break
        res = apply_rr2(cur, kk, mode)
        if res.outcome is not Outcome.APPLIED:
            res = part_rule(cur, kk, Modulator.of(xs, mode))
        if res.outcome is not Outcome.APPLIED:
            break
        steps.append(TraceStep(res.rule, tuple(orig[v] for v in res.removed), res.decrement))
        remap = res.remap
        orig = [o for v, o in enumerate(orig) if v in remap]
        xs = [remap[v] for v in xs if v in remap]
        cur, kk = res.graph, res.k
    trace = KernelTrace(mode, k, kk, tuple(steps))
    result = KernelResult(outcome, cur, kk, trace, Modulator.of(xs, mode), tuple(orig))
    if outcome == "KERNEL" and cur.n > result.size_bound:
        raise AssertionError(f"kernel has {cur.n} vertices, above the bound {result.size_bound}")
    return result


def replay_trace(g: Graph, trace: KernelTrace) -> tuple[Graph, int]:
    """Remove the traced vertices one step at a time; returns (graph, k)."""
    orig = list(range(g.n))
    cur, k = g, trace.initial_k
    for step in trace.steps:
        where = {o: v for v, o in enumerate(orig)}
        try:
            local = [where[o] for o in step.removed]
        except KeyError as exc:
            raise KernelError(f"trace removes vertex {exc} twice or it does not exist") from None
        cur, remap = remove_vertices(cur, local)
        orig = [o for v, o in enumerate(orig) if v in remap]
        k -= step.decrement
    if k != trace.final_k:
        raise KernelError(f"trace decrements give k={k}, trace says {trace.final_k}")
    return cur, k
