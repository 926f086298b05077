"""SAT to Metric Dimension gadgets with small vertex cover / distance to clique.

Vertex roles (1-based indices as in the construction):

    t[i] a1[i] b1[i] f[i] b2[i] a2[i]   6-cycle of variable i, in cycle order
    g1 g g2                             path, g adjacent to every t[i] and f[i]
    c1[j] c2[j]                         clause pair of clause j
    z1[l] z[l] z2[l]                    path; z[1..alpha] and g form a clique

``c2[j]`` sees every t[i] and f[i]; ``c1[j]`` sees t[i] (resp. f[i]) when
x_i = True (resp. False) does not satisfy clause j.  Both clause vertices
see z[l] when bit l (1-based, least significant first) of j is set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from mdkit.graph import (
    DistanceMatrix,
    Graph,
    all_pairs_distances,
    from_edges,
    is_clique,
    is_vertex_cover,
    remove_vertices,
)
from mdkit.resolve import ResolvingCertificate, distance_vector, is_resolving_set


class CnfError(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    n: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise CnfError("formula needs at least one variable")
        seen = set()
        for j, clause in enumerate(self.clauses, 1):
            if not clause:
                raise CnfError(f"clause {j} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n:
                    raise CnfError(f"clause {j}: literal {lit} out of range 1..{self.n}")
            if any(-lit in clause for lit in clause):
                raise CnfError(f"clause {j} is tautological: {list(clause)}")
            key = frozenset(clause)
            if key in seen:
                raise CnfError(f"clause {j} duplicates an earlier clause")
            seen.add(key)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @classmethod
    def from_clauses(cls, n: int, clauses: Sequence[Sequence[int]]) -> "CnfFormula":
        """Normalize literal order and drop repeated clauses (first occurrence wins)."""
        out = []
        seen = set()
        for clause in clauses:
            lits = tuple(sorted(set(clause), key=lambda x: (abs(x), x)))
            key = frozenset(lits)
            if key in seen:
                continue
            seen.add(key)
            out.append(lits)
        return cls(n, tuple(out))

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(
            any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause)
            for clause in self.clauses
        )

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {self.m}"]
        lines += [" ".join(str(l) for l in clause) + " 0" for clause in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs_cnf(text: str) -> CnfFormula:
    n = declared_m = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if n is not None:
                raise CnfError(f"line {lineno}: second problem line")
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise CnfError(f"line {lineno}: non-integer in problem line") from None
            continue
        if n is None:
            raise CnfError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise CnfError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise CnfError(f"line {lineno}: empty clause")
                if any(-l in current for l in current):
                    raise CnfError(f"line {lineno}: tautological clause {current}")
                clauses.append(current)
                current = []
            elif abs(lit) > n:
                raise CnfError(f"line {lineno}: literal {lit} exceeds declared {n} variables")
            else:
                current.append(lit)
    if n is None:
        raise CnfError("missing 'p cnf' problem line")
    if current:
        raise CnfError("last clause is not terminated by 0")
    if len(clauses) != declared_m:
        raise CnfError(f"problem line declares {declared_m} clauses, found {len(clauses)}")
    return CnfFormula.from_clauses(n, clauses)


def sat_brute_force(f: CnfFormula, cap: int = 2**20) -> tuple[bool, ...] | None:
    """Lexicographically smallest satisfying assignment (False < True), or None."""
    if 2**f.n > cap:
        raise CnfError(f"2^{f.n} assignments exceed the cap {cap}")
    for bits in itertools.product((False, True), repeat=f.n):
        if f.satisfied_by(bits):
            return bits
    return None


def alpha_for(n: int) -> int:
    """ceil(n * log2(3)) computed as the least a with 2^a >= 3^n."""
    target = 3**n
    a = 0
    while (1 << a) < target:
        a += 1
    return a


def bit(j: int, ell: int) -> int:
    """bin(j)[ell]: the ell-th bit of j counted from the right, 1-based."""
    return (j >> (ell - 1)) & 1


@dataclass(frozen=True)
class SatGadgetArtifact:
    graph: Graph
    k: int
    alpha: int
    variant: str  # "vc" or "clique"
    formula: CnfFormula

    @property
    def n(self) -> int:
        return self.formula.n

    @property
    def m(self) -> int:
        return self.formula.m

    def v(self, label: str) -> int:
        return self.graph.vertex(label)


def _build(f: CnfFormula, variant: str) -> SatGadgetArtifact:
    n, m = f.n, f.m
    alpha = alpha_for(n)
    labels: list[str] = []
    for i in range(1, n + 1):
        labels += [f"t[{i}]", f"a1[{i}]", f"b1[{i}]", f"f[{i}]", f"b2[{i}]", f"a2[{i}]"]
    labels += ["g1", "g", "g2"]
    for j in range(1, m + 1):
        labels += [f"c1[{j}]", f"c2[{j}]"]
    for ell in range(1, alpha + 1):
        labels += [f"z1[{ell}]", f"z[{ell}]", f"z2[{ell}]"]
    vid = {lab: v for v, lab in enumerate(labels)}
    edges: list[tuple[int, int]] = []

    def e(a: str, b: str) -> None:
        edges.append((vid[a], vid[b]))

    for i in range(1, n + 1):
        cyc = [f"t[{i}]", f"a1[{i}]", f"b1[{i}]", f"f[{i}]", f"b2[{i}]", f"a2[{i}]"]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            e(a, b)
        e(f"t[{i}]", "g")
        e(f"f[{i}]", "g")
    e("g1", "g")
    e("g", "g2")
    for j, clause in enumerate(f.clauses, 1):
        for i in range(1, n + 1):
            e(f"c2[{j}]", f"t[{i}]")
            e(f"c2[{j}]", f"f[{i}]")
            if i not in clause:  # x_i = True does not satisfy clause j
                e(f"c1[{j}]", f"t[{i}]")
            if -i not in clause:
                e(f"c1[{j}]", f"f[{i}]")
        for ell in range(1, alpha + 1):
            if bit(j, ell):
                e(f"c1[{j}]", f"z[{ell}]")
                e(f"c2[{j}]", f"z[{ell}]")
    for ell in range(1, alpha + 1):
        e(f"z1[{ell}]", f"z[{ell}]")
        e(f"z[{ell}]", f"z2[{ell}]")
    hub = ["g"] + [f"z[{ell}]" for ell in range(1, alpha + 1)]
    for a, b in itertools.combinations(hub, 2):
        e(a, b)
    if variant == "clique":
        clause_vertices = [f"c{s}[{j}]" for j in range(1, m + 1) for s in (1, 2)]
        for a, b in itertools.combinations(clause_vertices, 2):
            e(a, b)
    g = from_edges(len(labels), edges, dict(enumerate(labels)))
    return SatGadgetArtifact(g, n + alpha + 1, alpha, variant, f)


def build_vc_gadget(f: CnfFormula) -> SatGadgetArtifact:
    return _build(f, "vc")


def build_clique_gadget(f: CnfFormula) -> SatGadgetArtifact:
    return _build(f, "clique")


def r1_vertices(art: SatGadgetArtifact) -> list[int]:
    """The ordered set (g1, z1[1], ..., z1[alpha])."""
    return [art.v("g1")] + [art.v(f"z1[{ell}]") for ell in range(1, art.alpha + 1)]


def resolving_set_from_sat_assignment(
    art: SatGadgetArtifact,
    f: CnfFormula,
    phi: Sequence[bool],
    dist: DistanceMatrix | None = None,
) -> ResolvingCertificate:
    if len(phi) != f.n or not f.satisfied_by(phi):
        raise ValueError("assignment does not satisfy the formula")
    r2 = [art.v(f"a1[{i}]" if phi[i - 1] else f"b1[{i}]") for i in range(1, f.n + 1)]
    return is_resolving_set(art.graph, r1_vertices(art) + r2, dist)


@dataclass(frozen=True)
class VectorCheck:
    vertex: str
    row: str
    expected: tuple[int, ...]
    actual: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class Table1Report:
    entries: tuple[VectorCheck, ...]

    @property
    def mismatches(self) -> list[VectorCheck]:
        return [c for c in self.entries if not c.ok]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_record(self) -> dict:
        return {
            "checked": len(self.entries),
            "mismatches": [
                {"vertex": c.vertex, "row": c.row, "expected": list(c.expected), "actual": list(c.actual)}
                for c in self.mismatches
            ],
        }


def table1_rows(art: SatGadgetArtifact) -> list[tuple[str, str, tuple[int, ...]]]:
    """(vertex label, row name, expected R1 distance vector) for every tabulated vertex."""
    a = art.alpha
    rows = [("g2", "g2", (2,) + (3,) * a), ("g", "g", (1,) + (2,) * a)]
    for i in range(1, art.n + 1):
        for lab in (f"t[{i}]", f"f[{i}]"):
            rows.append((lab, "T", (2,) + (3,) * a))
        for lab in (f"a1[{i}]", f"a2[{i}]", f"b1[{i}]", f"b2[{i}]"):
            rows.append((lab, "I", (3,) + (4,) * a))
    for j in range(1, art.m + 1):
        vec = (3,) + tuple(3 - bit(j, ell) for ell in range(1, a + 1))
        rows.append((f"c1[{j}]", "C_j", vec))
        rows.append((f"c2[{j}]", "C_j", vec))
    for ell in range(1, a + 1):
        rows.append((f"z[{ell}]", "z_l", (2,) + tuple(1 if q == ell else 2 for q in range(1, a + 1))))
        rows.append((f"z2[{ell}]", "z2_l", (3,) + tuple(2 if q == ell else 3 for q in range(1, a + 1))))
    return rows


def check_table1(art: SatGadgetArtifact, dist: DistanceMatrix | None = None) -> Table1Report:
    d = all_pairs_distances(art.graph) if dist is None else dist
    r1 = r1_vertices(art)
    entries = [
        VectorCheck(lab, row, exp, distance_vector(art.graph, r1, art.v(lab), d))
        for lab, row, exp in table1_rows(art)
    ]
    return Table1Report(tuple(entries))


def _variable_set(art: SatGadgetArtifact, *prefixes: str) -> list[int]:
    return [art.v(f"{p}[{i}]") for i in range(1, art.n + 1) for p in prefixes]


def vc_witness(art: SatGadgetArtifact) -> list[int]:
    """{g} + T + {a1[i], a2[i]} + {z[l]}; size 4n + alpha + 1."""
    if art.variant != "vc":
        raise ValueError("vertex cover witness is defined for the vc variant")
    cover = [art.v("g")] + _variable_set(art, "t", "f", "a1", "a2")
    cover += [art.v(f"z[{ell}]") for ell in range(1, art.alpha + 1)]
    cover.sort()
    if not is_vertex_cover(art.graph, cover):
        raise AssertionError("vertex cover witness misses an edge")
    return cover


def clause_vertices(art: SatGadgetArtifact) -> list[int]:
    return sorted(art.v(f"c{s}[{j}]") for j in range(1, art.m + 1) for s in (1, 2))


def clique_modulator_witness(art: SatGadgetArtifact) -> list[int]:
    """All vertices outside the clause clique; size 6n + 3 alpha + 3."""
    if art.variant != "clique":
        raise ValueError("clique modulator witness is defined for the clique variant")
    keep = set(clause_vertices(art))
    mod = [v for v in range(art.graph.n) if v not in keep]
    rest, _ = remove_vertices(art.graph, mod)
    if not is_clique(rest, range(rest.n)):
        raise AssertionError("clause vertices do not induce a clique")
    return mod
