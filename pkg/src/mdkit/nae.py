"""NAE-Integer-3-SAT to Metric Dimension gadget (small feedback vertex set).

Label grammar.  ``X`` is a variable tag ``x<i>`` and ``S`` a clause side
tag ``c<j>`` or ``cbar<j>`` (0-based indices); ``#<k>`` numbers path
interiors starting from the clause end of the path.

    u1[X] u2[X] v[X][i] w[X][i]         variable cycle, i in 1..d
    c[j] cbar[j]                        the clause vertex of each side
    v[S] p1[S] p2[S]                    rest of the side's K_{1,3} core
    Pb[S]#k  b[S]                       path of length d from the clause vertex to b
    P1[X][S]#k  P2[X][S]#k              paths joining side S to the cycle of X
    w[X][S] claw[X][S] t1[X][S] t2[X][S]    pendant claw on that connection
    t1 p t2                             central path
    Pl[S]#k  w[S] claw[S] t1[S] t2[S]   path p..v[S] of length 2d and its claw

A pendant claw is a K_{1,3} glued onto ``w`` by identifying one leaf, so it
adds ``claw`` (the centre) and the leaves ``t1`` and ``t2``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from mdkit.graph import (
    DistanceMatrix,
    Graph,
    all_pairs_distances,
    from_edges,
    is_acyclic,
    remove_vertices,
)
from mdkit.resolve import ResolvingCertificate, is_resolving_set


class NaeError(ValueError):
    pass


@dataclass(frozen=True)
class NaeInstance:
    d: int
    var_count: int
    clauses: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        if self.d < 1:
            raise NaeError(f"domain bound d must be >= 1, got {self.d}")
        if self.var_count < 0:
            raise NaeError("variable count must be non-negative")
        for j, clause in enumerate(self.clauses):
            if len(clause) != 3:
                raise NaeError(f"clause {j} has {len(clause)} literals, expected 3")
            vs = [x for x, _ in clause]
            if len(set(vs)) != 3:
                raise NaeError(f"clause {j} repeats a variable: {vs}")
            for x, a in clause:
                if not 0 <= x < self.var_count:
                    raise NaeError(f"clause {j}: variable {x} out of range")
                if not 1 <= a <= self.d:
                    raise NaeError(f"clause {j}: bound {a} outside 1..{self.d}")

    @classmethod
    def create(cls, d: int, var_count: int, clauses) -> "NaeInstance":
        return cls(d, var_count, tuple(tuple((int(x), int(a)) for x, a in c) for c in clauses))

    def unused_variables(self) -> list[int]:
        """Variables occurring in no clause; each leaves its cycle as a separate component."""
        used = {x for clause in self.clauses for x, _ in clause}
        return [x for x in range(self.var_count) if x not in used]

    def satisfied_by(self, phi: Sequence[int]) -> bool:
        for clause in self.clauses:
            truth = {phi[x] <= a for x, a in clause}
            if len(truth) != 2:
                return False
        return True


def nae_brute_force(inst: NaeInstance, cap: int = 10**6) -> tuple[int, ...] | None:
    """Lexicographically smallest satisfying assignment, or None when unsatisfiable."""
    if inst.d**inst.var_count > cap:
        raise NaeError(f"{inst.d}^{inst.var_count} assignments exceed the cap {cap}")
    for phi in itertools.product(range(1, inst.d + 1), repeat=inst.var_count):
        if inst.satisfied_by(phi):
            return phi
    return None


def sides(inst: NaeInstance) -> list[tuple[int, str]]:
    return [(j, s) for j in range(len(inst.clauses)) for s in ("c", "cbar")]


def tag(j: int, side: str) -> str:
    return f"{side}{j}"


@dataclass(frozen=True)
class GadgetArtifact:
    graph: Graph
    k: int
    instance: NaeInstance

    @property
    def label_map(self):
        return self.graph.labels

    def v(self, label: str) -> int:
        return self.graph.vertex(label)

    def cycle_vertex(self, x: int, i: int, branch: str = "v") -> int:
        """v_i (or w_i) of variable x, with index 0 meaning u1 and d+1 meaning u2."""
        if i == 0:
            return self.v(f"u1[x{x}]")
        if i == self.instance.d + 1:
            return self.v(f"u2[x{x}]")
        return self.v(f"{branch}[x{x}][{i}]")

    def variable_cycle(self, x: int) -> list[int]:
        d = self.instance.d
        labels = [f"u1[x{x}]", f"u2[x{x}]"]
        labels += [f"{b}[x{x}][{i}]" for b in "vw" for i in range(1, d + 1)]
        return sorted(self.v(lab) for lab in labels)

    def side_part(self, j: int, side: str) -> list[int]:
        """V(H_l): the K_{1,3} core of the side plus its path to b."""
        t = tag(j, side)
        labels = [f"{side}[{j}]", f"v[{t}]", f"p1[{t}]", f"p2[{t}]", f"b[{t}]"]
        labels += [f"Pb[{t}]#{k}" for k in range(1, self.instance.d)]
        return sorted(self.v(lab) for lab in labels)


class _Builder:
    def __init__(self):
        self.labels: list[str] = []
        self.ids: dict[str, int] = {}
        self.edges: list[tuple[int, int]] = []

    def add(self, label: str) -> int:
        vid = len(self.labels)
        self.labels.append(label)
        self.ids[label] = vid
        return vid

    def edge(self, a: int, b: int) -> None:
        self.edges.append((a, b))

    def path_interior(self, labels: list[str]) -> list[int]:
        return [self.add(lab) for lab in labels]

    def chain(self, vertices: list[int]) -> None:
        for a, b in zip(vertices, vertices[1:]):
            self.edge(a, b)

    def claw(self, attach: int, suffix: str) -> None:
        centre = self.add(f"claw{suffix}")
        self.edge(attach, centre)
        self.edge(centre, self.add(f"t1{suffix}"))
        self.edge(centre, self.add(f"t2{suffix}"))


def _interior_labels(prefix: str, length: int, special: dict[int, str] | None = None) -> list[str]:
    special = special or {}
    return [special.get(k, f"{prefix}#{k}") for k in range(1, length)]


def build_nae_gadget(inst: NaeInstance) -> GadgetArtifact:
    d = inst.d
    bld = _Builder()
    ids = bld.ids

    for x in range(inst.var_count):
        ring = [bld.add(f"u1[x{x}]")]
        ring += [bld.add(f"v[x{x}][{i}]") for i in range(1, d + 1)]
        ring.append(bld.add(f"u2[x{x}]"))
        ring += [bld.add(f"w[x{x}][{i}]") for i in range(d, 0, -1)]
        bld.chain(ring + ring[:1])

    for j, side in sides(inst):
        t = tag(j, side)
        ell = bld.add(f"{side}[{j}]")
        centre = bld.add(f"v[{t}]")
        for leaf in (ell, bld.add(f"p1[{t}]"), bld.add(f"p2[{t}]")):
            bld.edge(centre, leaf)
        inner = bld.path_interior(_interior_labels(f"Pb[{t}]", d))
        bld.chain([ell] + inner + [bld.add(f"b[{t}]")])

    for x in range(inst.var_count):
        for j, clause in enumerate(inst.clauses):
            bounds = dict(clause)
            if x not in bounds:
                continue
            a = bounds[x]
            for side in ("c", "cbar"):
                t = tag(j, side)
                if side == "c":
                    # b^c -> u1 (4d - a), v^c -> u2 (4d + a - 1), claw on the latter
                    paths = [("P1", f"b[{t}]", f"u1[x{x}]", 4 * d - a, False),
                             ("P2", f"v[{t}]", f"u2[x{x}]", 4 * d + a - 1, True)]
                else:
                    # v^cbar -> u1 (5d - a) with claw, b^cbar -> u2 (3d + a)
                    paths = [("P1", f"v[{t}]", f"u1[x{x}]", 5 * d - a, True),
                             ("P2", f"b[{t}]", f"u2[x{x}]", 3 * d + a, False)]
                for name, start, end, length, with_claw in paths:
                    special = {1: f"w[x{x}][{t}]"} if with_claw else None
                    inner = bld.path_interior(_interior_labels(f"{name}[x{x}][{t}]", length, special))
                    bld.chain([ids[start]] + inner + [ids[end]])
                    if with_claw:
                        bld.claw(inner[0], f"[x{x}][{t}]")

    t1, p, t2 = bld.add("t1"), bld.add("p"), bld.add("t2")
    bld.chain([t1, p, t2])
    for j, side in sides(inst):
        t = tag(j, side)
        inner = bld.path_interior(_interior_labels(f"Pl[{t}]", 2 * d, {2 * d - 1: f"w[{t}]"}))
        bld.chain([ids[f"v[{t}]"]] + inner + [p])
        bld.claw(inner[-1], f"[{t}]")

    g = from_edges(len(bld.labels), bld.edges, dict(enumerate(bld.labels)))
    return GadgetArtifact(g, inst.var_count + 10 * len(inst.clauses) + 1, inst)


_LABEL_RE = re.compile(
    r"^(?:"
    r"(?P<anchor>u1|u2)\[x(?P<ax>\d+)\]"
    r"|(?P<cyc>[vw])\[x(?P<cx>\d+)\]\[(?P<ci>\d+)\]"
    r"|(?P<clause>c|cbar)\[(?P<cj>\d+)\]"
    r"|(?P<core>v|p1|p2|b|w|claw|t1|t2)\[(?P<cs>cbar|c)(?P<csj>\d+)\]"
    r"|(?P<path>Pb|Pl)\[(?P<ps>cbar|c)(?P<psj>\d+)\]#(?P<pk>\d+)"
    r"|(?P<conn>P1|P2)\[x(?P<qx>\d+)\]\[(?P<qs>cbar|c)(?P<qj>\d+)\]#(?P<qk>\d+)"
    r"|(?P<pend>w|claw|t1|t2)\[x(?P<rx>\d+)\]\[(?P<rs>cbar|c)(?P<rj>\d+)\]"
    r"|(?P<central>t1|p|t2)"
    r")$"
)


def parse_label(label: str) -> dict:
    """Split a gadget label into its role and indices."""
    m = _LABEL_RE.match(label)
    if m is None:
        raise NaeError(f"label {label!r} does not follow the gadget grammar")
    g = m.groupdict()
    if g["anchor"]:
        return {"role": g["anchor"], "var": int(g["ax"])}
    if g["cyc"]:
        return {"role": g["cyc"], "var": int(g["cx"]), "index": int(g["ci"])}
    if g["clause"]:
        return {"role": "clause", "side": g["clause"], "clause": int(g["cj"])}
    if g["core"]:
        return {"role": g["core"], "side": g["cs"], "clause": int(g["csj"])}
    if g["path"]:
        return {"role": g["path"], "side": g["ps"], "clause": int(g["psj"]), "pos": int(g["pk"])}
    if g["conn"]:
        return {"role": g["conn"], "var": int(g["qx"]), "side": g["qs"],
                "clause": int(g["qj"]), "pos": int(g["qk"])}
    if g["pend"]:
        return {"role": g["pend"], "var": int(g["rx"]), "side": g["rs"], "clause": int(g["rj"])}
    return {"role": g["central"]}


def fvs_witness(art: GadgetArtifact) -> list[int]:
    """{p} plus both anchors of every variable cycle; removal leaves a forest."""
    try:
        s = [art.v("p")]
        for x in range(art.instance.var_count):
            s += [art.v(f"u1[x{x}]"), art.v(f"u2[x{x}]")]
    except KeyError as exc:
        raise NaeError(f"artifact is missing gadget labels: {exc}") from None
    rest, _ = remove_vertices(art.graph, s)
    if not is_acyclic(rest):
        raise AssertionError("feedback vertex set witness leaves a cycle")
    return sorted(s)


def forced_vertices(art: GadgetArtifact) -> list[int]:
    """The index-1 representatives of every twin pair: t1, p1/t1 of each side, t1 of each pendant claw."""
    inst = art.instance
    out = [art.v("t1")]
    for j, clause in enumerate(inst.clauses):
        for side in ("c", "cbar"):
            out += [art.v(f"p1[{tag(j, side)}]"), art.v(f"t1[{tag(j, side)}]")]
        for x, _ in clause:
            for side in ("c", "cbar"):
                out.append(art.v(f"t1[x{x}][{tag(j, side)}]"))
    return out


def resolving_set_from_assignment(
    art: GadgetArtifact,
    inst: NaeInstance,
    phi: Sequence[int],
    dist: DistanceMatrix | None = None,
) -> ResolvingCertificate:
    if len(phi) != inst.var_count or not inst.satisfied_by(phi):
        raise NaeError("assignment does not satisfy the instance")
    s = forced_vertices(art) + [art.v(f"v[x{x}][{phi[x]}]") for x in range(inst.var_count)]
    return is_resolving_set(art.graph, s, dist)


@dataclass(frozen=True)
class SweepReport:
    candidates: int
    resolving: tuple[tuple[tuple[str, int], ...], ...]
    induced: tuple[tuple[int, ...], ...]
    satisfying: tuple[bool, ...]

    @property
    def induced_all_satisfying(self) -> bool:
        return all(self.satisfying)

    def to_record(self) -> dict:
        return {
            "candidates": self.candidates,
            "resolving": [[list(c) for c in choice] for choice in self.resolving],
            "induced": [list(a) for a in self.induced],
            "induced_all_satisfying": self.induced_all_satisfying,
        }


def _unique_columns(rows: np.ndarray) -> bool:
    return np.unique(rows.T, axis=0).shape[0] == rows.shape[1]


def reverse_candidate_sweep(
    art: GadgetArtifact,
    inst: NaeInstance,
    cap: int = 10**4,
    dist: DistanceMatrix | None = None,
) -> SweepReport:
    """Try every one-vertex-per-cycle completion of the forced vertex set."""
    d, nvars = inst.d, inst.var_count
    if (2 * d) ** nvars > cap:
        raise NaeError(f"(2d)^|X| = {(2 * d) ** nvars} candidates exceed the cap {cap}")
    dm = (all_pairs_distances(art.graph) if dist is None else dist).dist
    forced = forced_vertices(art)
    _, base = np.unique(dm[forced, :].T, axis=0, return_inverse=True)
    base = base.reshape(1, -1)
    options = [("v", i) for i in range(1, d + 1)] + [("w", i) for i in range(1, d + 1)]
    rows = {
        (x, b, i): dm[art.v(f"{b}[x{x}][{i}]")]
        for x in range(nvars)
        for b, i in options
    }
    resolving, induced, sat = [], [], []
    total = 0
    for choice in itertools.product(options, repeat=nvars):
        total += 1
        stack = np.vstack([base] + [rows[(x, b, i)] for x, (b, i) in enumerate(choice)])
        if _unique_columns(stack):
            phi = tuple(i for _, i in choice)
            resolving.append(choice)
            induced.append(phi)
            sat.append(inst.satisfied_by(phi))
    return SweepReport(total, tuple(resolving), tuple(induced), tuple(sat))


def candidate_set(art: GadgetArtifact, choice: Sequence[tuple[str, int]]) -> list[int]:
    return forced_vertices(art) + [art.v(f"{b}[x{x}][{i}]") for x, (b, i) in enumerate(choice)]


def twin_swap_spot_check(
    art: GadgetArtifact,
    choice: Sequence[tuple[str, int]],
    dist: DistanceMatrix | None = None,
) -> bool:
    """Replacing every forced index-1 pick by its index-2 twin must not change the verdict."""
    base = candidate_set(art, choice)
    swapped = []
    for v in base:
        lab = art.graph.label(v)
        if lab.startswith(("t1", "p1")):
            lab = lab.replace("1", "2", 1)
        swapped.append(art.v(lab))
    dm = all_pairs_distances(art.graph) if dist is None else dist
    return is_resolving_set(art.graph, base, dm).verified == is_resolving_set(art.graph, swapped, dm).verified


# --------------------------------------------------------------------------
# distance claims


@dataclass(frozen=True)
class ClaimCheck:
    claim: str
    subject: str
    relation: str  # "==" or ">="
    expected: int
    actual: int

    @property
    def ok(self) -> bool:
        if self.relation == "==":
            return self.actual == self.expected
        return self.actual >= self.expected


@dataclass(frozen=True)
class ClaimReport:
    entries: tuple[ClaimCheck, ...]

    @property
    def mismatches(self) -> list[ClaimCheck]:
        return [c for c in self.entries if not c.ok]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_record(self) -> dict:
        return {
            "checked": len(self.entries),
            "mismatches": [
                {"claim": c.claim, "subject": c.subject, "relation": c.relation,
                 "expected": c.expected, "actual": c.actual}
                for c in self.mismatches
            ],
        }


def expected_clause_distances(d: int, a: int, i: int) -> dict[str, int]:
    """Closed forms for distances from v_i of a member variable with bound a."""
    return {
        # towards the positive side c
        "to-c": 5 * d + i - a if i <= a else 5 * d + 1 + a - i,
        "to-v[c]": 5 * d + 1 + i - a if i <= a - 1 else 5 * d + a - i,
        "to-t1[x][c]": 5 * d + 4 + i - a if i <= a - 2 else 5 * d + 1 + a - i,
        # towards the negative side cbar
        "to-cbar": 5 * d + 1 + i - a if i <= a else 5 * d + 1 + a - i,
        "to-v[cbar]": 5 * d + i - a if i <= a + 1 else 5 * d + 2 + a - i,
        "to-t1[x][cbar]": 5 * d + 1 + i - a if i <= a + 2 else 5 * d + 5 + a - i,
    }


def _claim_targets(j: int, x: int) -> dict[str, str]:
    c, cb = tag(j, "c"), tag(j, "cbar")
    return {
        "to-c": f"c[{j}]",
        "to-v[c]": f"v[{c}]",
        "to-t1[x][c]": f"t1[x{x}][{c}]",
        "to-cbar": f"cbar[{j}]",
        "to-v[cbar]": f"v[{cb}]",
        "to-t1[x][cbar]": f"t1[x{x}][{cb}]",
    }


def _iter_claims(art: GadgetArtifact, dm: DistanceMatrix) -> Iterator[ClaimCheck]:
    inst = art.instance
    d = inst.d
    side_list = sides(inst)
    parts = {s: art.side_part(*s) for s in side_list}
    cycles = {x: art.variable_cycle(x) for x in range(inst.var_count)}

    for s, t in itertools.combinations(side_list, 2):
        yield ClaimCheck("side-to-side", f"d(H[{tag(*s)}], H[{tag(*t)}])", "==", 4 * d,
                         dm.set_distance(parts[s], parts[t]))
    for x, y in itertools.combinations(range(inst.var_count), 2):
        yield ClaimCheck("cycle-to-cycle", f"d(G[x{x}], G[x{y}])", ">=", 6 * d,
                         dm.set_distance(cycles[x], cycles[y]))
    for s in side_list:
        members = {v for v, _ in inst.clauses[s[0]]}
        for x in range(inst.var_count):
            item, bound = ("cycle-to-member-side", 3 * d) if x in members else ("cycle-to-other-side", 8 * d)
            yield ClaimCheck(item, f"d(G[x{x}], H[{tag(*s)}])", ">=", bound,
                             dm.set_distance(cycles[x], parts[s]))

    for j, clause in enumerate(inst.clauses):
        for x, a in clause:
            targets = _claim_targets(j, x)
            for i in range(0, d + 2):
                src = art.cycle_vertex(x, i)
                for item, exp in expected_clause_distances(d, a, i).items():
                    dst = art.v(targets[item])
                    yield ClaimCheck(item, f"d(v[x{x}][{i}], {targets[item]})", "==", exp,
                                     dm[src, dst])


def check_distance_claims(
    art: GadgetArtifact, inst: NaeInstance | None = None, dist: DistanceMatrix | None = None
) -> ClaimReport:
    if inst is not None and inst != art.instance:
        raise NaeError("instance does not match the artifact")
    dm = all_pairs_distances(art.graph) if dist is None else dist
    return ClaimReport(tuple(_iter_claims(art, dm)))

