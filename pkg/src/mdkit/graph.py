"""Undirected simple graphs, BFS distances and twin structure."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

# Larger than any finite distance; compares equal only to itself.
UNREACHABLE = int(np.iinfo(np.int32).max)


class GraphError(ValueError):
    """Raised on malformed graph input."""


@dataclass(frozen=True, eq=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    labels: Mapping[int, str] = field(default_factory=dict)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_set(u)

    def neighbor_set(self, v: int) -> frozenset[int]:
        return self._neighbor_sets[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as (u, v) with u < v, lexicographically sorted."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def vertex(self, label: str) -> int:
        """Id of the vertex carrying ``label``."""
        try:
            return self._label_index[label]
        except KeyError:
            raise KeyError(f"no vertex labelled {label!r}") from None

    def label(self, v: int) -> str:
        return self.labels.get(v, str(v))

    @property
    def _neighbor_sets(self) -> tuple[frozenset[int], ...]:
        cached = self.__dict__.get("_nsets")
        if cached is None:
            cached = tuple(frozenset(a) for a in self.adjacency)
            object.__setattr__(self, "_nsets", cached)
        return cached

    @property
    def _label_index(self) -> dict[str, int]:
        cached = self.__dict__.get("_lidx")
        if cached is None:
            cached = {lab: v for v, lab in self.labels.items()}
            object.__setattr__(self, "_lidx", cached)
        return cached


def from_edges(
    n: int,
    edges: Iterable[tuple[int, int]],
    labels: Mapping[int, str] | None = None,
) -> Graph:
    """Build a graph on vertices 0..n-1; duplicate edges are merged."""
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"edge ({u}, {v}) is a self-loop")
        adj[u].add(v)
        adj[v].add(u)
    lab: dict[int, str] = {}
    if labels:
        seen: dict[str, int] = {}
        for v, name in labels.items():
            if not 0 <= v < n:
                raise GraphError(f"label for unknown vertex {v}")
            if name in seen:
                raise GraphError(f"label {name!r} used by vertices {seen[name]} and {v}")
            seen[name] = v
            lab[v] = name
        lab = dict(sorted(lab.items()))
    return Graph(n, tuple(tuple(sorted(a)) for a in adj), lab)


@dataclass(frozen=True)
class DistanceMatrix:
    n: int
    dist: np.ndarray

    def __getitem__(self, uv: tuple[int, int]) -> int:
        u, v = uv
        return int(self.dist[u, v])

    def set_distance(self, a: Iterable[int], b: Iterable[int]) -> int:
        """min over x in a, y in b of d(x, y)."""
        a, b = list(a), list(b)
        return int(self.dist[np.ix_(a, b)].min())


def bfs_row(g: Graph, source: int) -> list[int]:
    row = [UNREACHABLE] * g.n
    row[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = row[u] + 1
        for w in g.adjacency[u]:
            if row[w] == UNREACHABLE:
                row[w] = du
                queue.append(w)
    return row


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    dist = np.array([bfs_row(g, s) for s in range(g.n)], dtype=np.int32).reshape(g.n, g.n)
    dist.setflags(write=False)
    return DistanceMatrix(g.n, dist)


@dataclass(frozen=True)
class TwinReport:
    true_twin_pairs: list[tuple[int, int]]
    false_twin_pairs: list[tuple[int, int]]

    def all_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.true_twin_pairs + self.false_twin_pairs)


def twin_classes(g: Graph) -> tuple[list[list[int]], list[list[int]]]:
    """Groups of mutual true twins and of mutual false twins, each of size >= 2."""
    closed: dict[frozenset[int], list[int]] = defaultdict(list)
    open_: dict[frozenset[int], list[int]] = defaultdict(list)
    for v in range(g.n):
        nb = g.neighbor_set(v)
        closed[nb | {v}].append(v)
        open_[nb].append(v)
    true_groups = sorted(grp for grp in closed.values() if len(grp) > 1)
    false_groups = sorted(grp for grp in open_.values() if len(grp) > 1)
    return true_groups, false_groups


def twins(g: Graph) -> TwinReport:
    true_groups, false_groups = twin_classes(g)
    tp = sorted(p for grp in true_groups for p in combinations(grp, 2))
    fp = sorted(p for grp in false_groups for p in combinations(grp, 2))
    return TwinReport(tp, fp)


def induced_p3s(g: Graph) -> list[tuple[int, int, int]]:
    """Every induced path a-b-c (a < c), middle vertex second."""
    out = []
    for b in range(g.n):
        nb = g.adjacency[b]
        for i, a in enumerate(nb):
            na = g.neighbor_set(a)
            for c in nb[i + 1:]:
                if c not in na:
                    out.append((a, b, c))
    out.sort()
    return out


def complement(g: Graph) -> Graph:
    edges = [
        (u, v)
        for u in range(g.n)
        for v in range(u + 1, g.n)
        if v not in g.neighbor_set(u)
    ]
    return from_edges(g.n, edges, g.labels)


def connected_components(g: Graph, alive: Iterable[int] | None = None) -> list[list[int]]:
    """Components (sorted lists, ordered by smallest member) of the subgraph on ``alive``."""
    keep = set(range(g.n)) if alive is None else set(alive)
    seen: set[int] = set()
    comps = []
    for s in sorted(keep):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if w in keep and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def is_acyclic(g: Graph) -> bool:
    return g.m == g.n - len(connected_components(g))


def remove_vertices(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Induced subgraph on V(g) - s with ids compacted; returns (graph, old -> new)."""
    drop = set(s)
    for v in drop:
        if not 0 <= v < g.n:
            raise GraphError(f"unknown vertex {v}")
    remap: dict[int, int] = {}
    for v in range(g.n):
        if v not in drop:
            remap[v] = len(remap)
    edges = [(remap[u], remap[v]) for u, v in g.edges() if u in remap and v in remap]
    labels = {remap[v]: lab for v, lab in g.labels.items() if v in remap}
    return from_edges(len(remap), edges, labels), remap


def is_clique(g: Graph, vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    return all(g.has_edge(u, v) for u, v in combinations(vs, 2))


def is_independent(g: Graph, vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    return not any(g.has_edge(u, v) for u, v in combinations(vs, 2))


def is_vertex_cover(g: Graph, cover: Iterable[int]) -> bool:
    c = set(cover)
    return all(u in c or v in c for u, v in g.edges())


def path_graph(n: int) -> Graph:
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return from_edges(n, combinations(range(n), 2))


def star_graph(leaves: int) -> Graph:
    return from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def empty_graph(n: int) -> Graph:
    return from_edges(n, [])
