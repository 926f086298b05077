"""Resolving sets and an exact metric dimension solver.

The solver works on the pair-distinguishing formulation: for every vertex
pair, the set of vertices whose distances to the two endpoints differ.  A
vertex set is resolving exactly when it hits every such set, so metric
dimension is a minimum hitting set problem.  The search is a
branch-and-bound over hitting sets with iterative deepening on the size
bound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from mdkit.graph import DistanceMatrix, Graph, all_pairs_distances, connected_components, twins


class SolverBudgetExceeded(RuntimeError):
    """The node cap was hit before the search finished (INDETERMINATE)."""

    def __init__(self, cap: int, explored: int):
        super().__init__(f"node cap {cap} exceeded after {explored} nodes")
        self.cap = cap
        self.explored = explored


class Status(str, enum.Enum):
    EXACT = "EXACT"
    EXCEEDS_BOUND = "EXCEEDS_BOUND"


@dataclass(frozen=True)
class ResolvingCertificate:
    vertices: tuple[int, ...]
    verified: bool
    witness_pair: tuple[int, int] | None = None

    def to_record(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "verified": self.verified,
            "witness_pair": None if self.witness_pair is None else list(self.witness_pair),
        }


@dataclass(frozen=True)
class MdResult:
    status: Status
    value: int | None
    certificate: ResolvingCertificate | None
    explored_nodes: int
    bound: int | None = None
    notes: tuple[str, ...] = ()

    def to_record(self) -> dict:
        return {
            "status": self.status.value,
            "value": self.value,
            "certificate": [] if self.certificate is None else list(self.certificate.vertices),
            "explored_nodes": self.explored_nodes,
            "bound": self.bound,
            "notes": list(self.notes),
        }


def _dist(g: Graph, dist: DistanceMatrix | None) -> DistanceMatrix:
    return all_pairs_distances(g) if dist is None else dist


def _check_ids(g: Graph, vs: Iterable[int]) -> list[int]:
    out = list(vs)
    for v in out:
        if not 0 <= v < g.n:
            raise ValueError(f"invalid vertex id {v}")
    return out


def distance_vector(
    g: Graph, s: Sequence[int], v: int, dist: DistanceMatrix | None = None
) -> tuple[int, ...]:
    """r(S|v): distances from each s_i (in order) to v."""
    s = _check_ids(g, s)
    if not s:
        raise ValueError("distance vector needs a non-empty vertex list")
    _check_ids(g, [v])
    d = _dist(g, dist)
    return tuple(int(d.dist[si, v]) for si in s)


def is_resolving_set(
    g: Graph, s: Iterable[int], dist: DistanceMatrix | None = None
) -> ResolvingCertificate:
    s = _check_ids(g, s)
    if g.n <= 1:
        return ResolvingCertificate(tuple(s), True)
    d = _dist(g, dist)
    groups: dict[bytes, list[int]] = {}
    cols = np.ascontiguousarray(d.dist[s, :].T) if s else np.zeros((g.n, 0), dtype=np.int32)
    for v in range(g.n):
        groups.setdefault(cols[v].tobytes(), []).append(v)
    clashes = [(grp[0], grp[1]) for grp in groups.values() if len(grp) > 1]
    if clashes:
        return ResolvingCertificate(tuple(s), False, min(clashes))
    return ResolvingCertificate(tuple(s), True)


def mandatory_pair_constraints(g: Graph) -> list[tuple[int, int]]:
    """Twin pairs; every resolving set meets each of them."""
    return twins(g).all_pairs()


def _mask_to_set(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _column_masks(neq: np.ndarray) -> list[int]:
    """Column j of a boolean (n x c) matrix packed into an int with bit i = row i."""
    packed = np.packbits(neq, axis=0, bitorder="little")
    return [int.from_bytes(packed[:, j].tobytes(), "little") for j in range(neq.shape[1])]


@dataclass
class DistinguishingInstance:
    universe: tuple[int, ...]
    pairs: list[tuple[int, int]]
    pair_index: dict[tuple[int, int], int]
    set_masks: list[int]
    empty_pairs: list[tuple[int, int]] = field(default_factory=list)

    def pair_set(self, u: int, v: int) -> frozenset[int]:
        key = (u, v) if u < v else (v, u)
        return _mask_to_set(self.set_masks[self.pair_index[key]])

    @property
    def pair_sets(self) -> list[frozenset[int]]:
        return [_mask_to_set(m) for m in self.set_masks]

    def is_hit_by(self, s: Iterable[int]) -> bool:
        sel = 0
        for v in s:
            sel |= 1 << v
        return all(m & sel for m in self.set_masks)


def _pair_masks(g: Graph, dist: DistanceMatrix) -> tuple[list[tuple[int, int]], list[int]]:
    pairs: list[tuple[int, int]] = []
    masks: list[int] = []
    d = dist.dist
    for u in range(g.n - 1):
        neq = d[:, [u]] != d[:, u + 1:]
        masks.extend(_column_masks(neq))
        pairs.extend((u, v) for v in range(u + 1, g.n))
    return pairs, masks


def build_distinguishing_instance(
    g: Graph, dist: DistanceMatrix | None = None
) -> DistinguishingInstance:
    d = _dist(g, dist)
    pairs, masks = _pair_masks(g, d)
    index_of: dict[int, int] = {}
    set_masks: list[int] = []
    pair_index: dict[tuple[int, int], int] = {}
    empty = []
    for p, m in zip(pairs, masks):
        if m == 0:
            empty.append(p)
        if m not in index_of:
            index_of[m] = len(set_masks)
            set_masks.append(m)
        pair_index[p] = index_of[m]
    return DistinguishingInstance(tuple(range(g.n)), pairs, pair_index, set_masks, empty)


def greedy_upper_bound(g: Graph, dist: DistanceMatrix | None = None) -> list[int]:
    """Add the vertex resolving most unresolved pairs until none remain."""
    if g.n < 2:
        raise ValueError("greedy bound needs at least two vertices")
    d = _dist(g, dist).dist
    iu, ju = np.triu_indices(g.n, 1)
    # resolves[w, p]: w separates pair p
    resolves = d[:, iu] != d[:, ju]
    unresolved = np.ones(len(iu), dtype=bool)
    chosen: list[int] = []
    while unresolved.any():
        gains = resolves[:, unresolved].sum(axis=1)
        w = int(np.argmax(gains))  # first maximum, i.e. smallest id on ties
        chosen.append(w)
        unresolved &= ~resolves[w]
    return sorted(chosen)


# --------------------------------------------------------------------------
# hitting set search


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _drop_supersets(masks: list[int], limit: int = 4000) -> list[int]:
    masks = sorted(set(masks), key=lambda m: (_popcount(m), m))
    if len(masks) > limit:
        return masks
    kept: list[int] = []
    for m in masks:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return kept


def _drop_dominated(masks: list[int], n: int) -> list[int]:
    """Delete vertices whose set memberships are contained in another live vertex's."""
    member = [0] * n
    for i, m in enumerate(masks):
        for v in _bits(m):
            member[v] |= 1 << i
    alive = [True] * n
    removed = 0
    for v in range(n):
        mv = member[v]
        for w in range(n):
            if w == v or not alive[w]:
                continue
            mw = member[w]
            if mv & ~mw == 0 and (mv != mw or w < v):
                alive[v] = False
                removed |= 1 << v
                break
    if not removed:
        return masks
    return [m & ~removed for m in masks]


def _packing_bound(masks: list[int]) -> int:
    used = 0
    count = 0
    for m in sorted(masks, key=_popcount):
        if m & used == 0:
            used |= m
            count += 1
    return count


class _Search:
    def __init__(self, masks: list[int], node_cap: int | None):
        self.masks = masks
        self.node_cap = node_cap
        self.nodes = 0

    def solve(self, budget: int) -> list[int] | None:
        return self._rec(self.masks, 0, budget)

    def _rec(self, masks: list[int], chosen: int, budget: int) -> list[int] | None:
        self.nodes += 1
        if self.node_cap is not None and self.nodes > self.node_cap:
            raise SolverBudgetExceeded(self.node_cap, self.nodes)
        if not masks:
            return _bits(chosen)
        if budget <= 0:
            return None
        if _packing_bound(masks) > budget:
            return None
        pivot = min(masks, key=lambda m: (_popcount(m), m))
        excluded = 0
        for v in _bits(pivot):
            bit = 1 << v
            rest = []
            dead = False
            for m in masks:
                if m & bit:
                    continue
                m &= ~excluded
                if not m:
                    dead = True
                    break
                rest.append(m)
            if not dead:
                found = self._rec(rest, chosen | bit, budget - 1)
                if found is not None:
                    return found
            excluded |= bit
        return None


def _reduced_masks(g: Graph, dist: DistanceMatrix) -> list[int]:
    _, masks = _pair_masks(g, dist)
    masks = _drop_supersets(masks)
    for _ in range(3):
        shrunk = _drop_supersets(_drop_dominated(masks, g.n))
        if shrunk == masks:
            break
        masks = shrunk
    return masks


def metric_dimension_exact(
    g: Graph,
    bound: int | None = None,
    node_cap: int | None = None,
    dist: DistanceMatrix | None = None,
) -> MdResult:
    """Exact metric dimension, or a proof that it exceeds ``bound``.

    When ``bound`` is given and some resolving set of size <= bound exists,
    the result is still EXACT and carries the true optimum.
    Raises SolverBudgetExceeded if ``node_cap`` search nodes are not enough.
    """
    notes: list[str] = []
    if g.n <= 1:
        notes.append("single-vertex graph: metric dimension taken as 0")
        cert = ResolvingCertificate((), True)
        return MdResult(Status.EXACT, 0, cert, 0, bound, tuple(notes))
    if len(connected_components(g)) > 1:
        notes.append("disconnected graph: unreachable distances compared as a sentinel value")
    d = _dist(g, dist)
    masks = _reduced_masks(g, d)
    lower = max(_packing_bound(masks), 1)
    upper = len(greedy_upper_bound(g, d))
    top = upper if bound is None else min(upper, bound)
    search = _Search(masks, node_cap)
    for k in range(lower, top + 1):
        if k == upper:
            found = greedy_upper_bound(g, d)
        else:
            found = search.solve(k)
        if found is not None:
            cert = is_resolving_set(g, found, d)
            if not cert.verified:
                raise AssertionError(f"solver produced a non-resolving set {found}")
            return MdResult(Status.EXACT, len(found), cert, search.nodes, bound, tuple(notes))
    return MdResult(Status.EXCEEDS_BOUND, None, None, search.nodes, bound, tuple(notes))

