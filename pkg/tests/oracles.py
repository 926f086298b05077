"""Slow reference implementations, written without the package's own code paths."""

from __future__ import annotations

import itertools

INF = float("inf")


def floyd_warshall(n: int, edges) -> list[list[float]]:
    d = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    for u, v in edges:
        d[u][v] = d[v][u] = 1
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == INF:
                continue
            di = d[i]
            for j in range(n):
                if dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    return d


def resolves(d, n: int, s) -> bool:
    seen = set()
    for v in range(n):
        key = tuple(d[w][v] for w in s)
        if key in seen:
            return False
        seen.add(key)
    return True


def brute_force_md(n: int, edges) -> int:
    if n <= 1:
        return 0
    d = floyd_warshall(n, edges)
    for size in range(1, n + 1):
        for s in itertools.combinations(range(n), size):
            if resolves(d, n, s):
                return size
    raise AssertionError("the full vertex set always resolves")


def neighbourhoods(n: int, edges) -> list[set[int]]:
    nb = [set() for _ in range(n)]
    for u, v in edges:
        nb[u].add(v)
        nb[v].add(u)
    return nb


def twin_pairs(n: int, edges) -> set[tuple[int, int]]:
    nb = neighbourhoods(n, edges)
    out = set()
    for u, v in itertools.combinations(range(n), 2):
        if nb[u] - {v} == nb[v] - {u}:
            out.add((u, v))
    return out


def is_cluster(n: int, edges, alive) -> bool:
    nb = neighbourhoods(n, edges)
    alive = set(alive)
    for b in alive:
        for a, c in itertools.combinations(sorted(nb[b] & alive), 2):
            if c not in nb[a]:
                return False
    return True


def min_cluster_modulator(n: int, edges) -> int:
    for size in range(n + 1):
        for s in itertools.combinations(range(n), size):
            if is_cluster(n, edges, set(range(n)) - set(s)):
                return size
    raise AssertionError("removing every vertex leaves a cluster graph")
