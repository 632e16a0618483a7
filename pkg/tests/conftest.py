"""Shared helpers: an independent Floyd-Warshall oracle and small fixtures."""
from __future__ import annotations

import itertools
import math

import pytest

from spannerlab.generators import random_connected_graph
from spannerlab.graph import WeightedGraph


def floyd_warshall(g: WeightedGraph) -> list[list[float]]:
    """All-pairs distances by the textbook triple loop; shares no code with the package."""
    n = g.n
    d = [[math.inf] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = 0
    for u, v, w in g.edges:
        d[u][v] = d[v][u] = min(d[u][v], w)
    for m in range(n):
        dm = d[m]
        for i in range(n):
            dim = d[i][m]
            if dim == math.inf:
                continue
            di = d[i]
            for j in range(n):
                if dim + dm[j] < di[j]:
                    di[j] = dim + dm[j]
    return d


def walk_weight(g: WeightedGraph, verts) -> float:
    return sum(g.weight(a, b) for a, b in zip(verts, verts[1:]))


def all_pairs(n: int):
    return itertools.combinations(range(n), 2)


@pytest.fixture(scope="session")
def fw_cache():
    cache: dict = {}

    def get(g: WeightedGraph):
        key = (g.n, g.edges)
        if key not in cache:
            cache[key] = floyd_warshall(g)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def graph100():
    return random_connected_graph(100, 7)


@pytest.fixture
def triangle():
    # x=0, y=1, z=2; xy=1, yz=2, xz=3: two shortest x-z routes of weight 3
    return WeightedGraph(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
