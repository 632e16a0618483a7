"""Thorup-Zwick sample hierarchies, bunches, clusters and the path-reporting oracle."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import INF, PathRecord, SearchForest, Unreachable, WeightedGraph, search_forest


@dataclass(frozen=True)
class SampleHierarchy:
    """Nested levels V = A_0 ⊇ A_1 ⊇ ... ; only the nonempty prefix is stored.

    ``max_levels`` is the nominal level count (k for the oracle, F for the
    hopset); ``levels`` may be shorter when sampling emptied a level early.
    """

    levels: tuple[frozenset[int], ...]
    max_levels: int
    probabilities: tuple[float, ...]
    seed: int | None

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, i: int) -> frozenset[int]:
        return self.levels[i] if i < len(self.levels) else frozenset()

    def top_level(self, v: int) -> int:
        """Largest i with v in A_i."""
        i = 0
        while i + 1 < len(self.levels) and v in self.levels[i + 1]:
            i += 1
        return i


def sample_hierarchy(n: int, probabilities: Sequence[float], seed: int | None) -> SampleHierarchy:
    """A_{i+1} keeps each vertex of A_i independently with ``probabilities[i]``.

    The level after the last probability is empty by definition; sampling
    stops at the first empty level.
    """
    rng = random.Random(seed)
    levels = [frozenset(range(n))]
    for p in probabilities[:-1]:
        nxt = frozenset(v for v in sorted(levels[-1]) if rng.random() < p)
        if not nxt:
            break
        levels.append(nxt)
    if n == 0:
        levels = []
    return SampleHierarchy(tuple(levels), len(probabilities), tuple(probabilities), seed)


class PivotTable:
    """Nearest level vertices p_i(u) and the forests that certify them.

    Ties in distance go to the vertex of the deepest level (so that p_i(u)
    always lies in u's bunch), then to the smaller vertex id.  ``route(i, u)``
    walks the certifying forest from u to p_i(u); every vertex x met on the way
    has p_i(x) = p_i(u).
    """

    def __init__(self, g: WeightedGraph, hierarchy: SampleHierarchy):
        self.depth = hierarchy.depth
        self.forests: list[SearchForest] = [search_forest(g, lvl) for lvl in hierarchy.levels]
        n = g.n
        self.level_dist: list[list[float]] = [f.dist for f in self.forests] + [[INF] * n]
        self.pivot = [[-1] * n for _ in range(self.depth)]
        self.dist = [[INF] * n for _ in range(self.depth)]
        self.source_level = [[-1] * n for _ in range(self.depth)]
        for i in reversed(range(self.depth)):
            forest = self.forests[i]
            for x in range(n):
                if not forest.reached(x):
                    continue
                if i + 1 < self.depth and self.level_dist[i + 1][x] == forest.dist[x]:
                    self.pivot[i][x] = self.pivot[i + 1][x]
                    self.source_level[i][x] = self.source_level[i + 1][x]
                else:
                    self.pivot[i][x] = forest.root[x]
                    self.source_level[i][x] = i
                self.dist[i][x] = forest.dist[x]

    def link(self, i: int, x: int) -> int:
        """Next vertex from x towards p_i(x), or -1 when x is its own pivot."""
        return self.forests[self.source_level[i][x]].parent[x]

    def route(self, i: int, u: int) -> list[int]:
        return self.forests[self.source_level[i][u]].route(u)


@dataclass
class Cluster:
    """Shortest-path tree of C(w) rooted at the centre w."""

    center: int
    level: int
    parent: dict[int, int]
    dist: dict[int, float]
    height: dict[int, int]

    def __len__(self) -> int:
        return len(self.parent)

    def __contains__(self, u: int) -> bool:
        return u in self.parent

    def route(self, u: int) -> list[int]:
        out = [u]
        while u != self.center:
            u = self.parent[u]
            out.append(u)
        return out


def grow_cluster(g: WeightedGraph, center: int, level: int, limit: Sequence[float]) -> Cluster:
    """C(w) = {u : d(u, w) < limit[u]}, with limit = distance to the next level."""
    f = search_forest(g, [center], limit)
    return Cluster(
        center,
        level,
        {x: f.parent[x] for x in f.order},
        {x: f.dist[x] for x in f.order},
        {x: f.height[x] for x in f.order},
    )


class BunchTable:
    """Bunches B(u) with distances, and the dual clusters C(w) as trees."""

    def __init__(self, g: WeightedGraph, hierarchy: SampleHierarchy, pivots: PivotTable):
        self.bunch: list[dict[int, float]] = [{} for _ in range(g.n)]
        self.clusters: dict[int, Cluster] = {}
        for i in range(hierarchy.depth):
            limit = pivots.level_dist[i + 1]
            for w in sorted(hierarchy.levels[i] - hierarchy.level(i + 1)):
                c = grow_cluster(g, w, i, limit)
                self.clusters[w] = c
                for u, d in c.dist.items():
                    self.bunch[u][w] = d

    def bunch_size(self) -> int:
        return sum(len(b) for b in self.bunch)

    def cluster_size(self) -> int:
        return sum(len(c) for c in self.clusters.values())


class TZOracle:
    """Path-reporting (2k-1)-stretch oracle.

    Queries use the classic level walk: alternate the endpoints' roles until
    the current pivot lies in the other endpoint's bunch, then join the two
    cluster-tree routes through that pivot.
    """

    kind = "tz"

    def __init__(self, g: WeightedGraph, k: int, hierarchy: SampleHierarchy):
        self.g = g
        self.k = k
        self.hierarchy = hierarchy
        self.pivots = PivotTable(g, hierarchy)
        self.table = BunchTable(g, hierarchy, self.pivots)
        self._component = g.components()

    @property
    def declared_stretch(self) -> int:
        return 2 * self.k - 1

    def meeting_point(self, u: int, v: int) -> tuple[int, int, int, bool]:
        """Returns (u', v', w, swapped): w in B(u') ∩ B(v') found by the walk."""
        bunch, pivot = self.table.bunch, self.pivots.pivot
        w, i, swapped = u, 0, False
        while w not in bunch[v]:
            i += 1
            u, v, swapped = v, u, not swapped
            w = pivot[i][u]
        return u, v, w, swapped

    def query(self, u: int, v: int) -> PathRecord | Unreachable:
        if self._component[u] != self._component[v]:
            return Unreachable(u, v)
        if u == v:
            return PathRecord((u,), 0)
        a, b, w, swapped = self.meeting_point(u, v)
        cluster = self.table.clusters[w]
        verts = cluster.route(a) + cluster.route(b)[-2::-1]
        if swapped:
            verts.reverse()
        return PathRecord(tuple(verts), cluster.dist[a] + cluster.dist[b])

    def estimate(self, u: int, v: int) -> float:
        a, b, w, _ = self.meeting_point(u, v)
        return self.table.bunch[a][w] + self.table.bunch[b][w]

    def spanner_edges(self) -> set[tuple[int, int]]:
        out = set()
        for c in self.table.clusters.values():
            for x, p in c.parent.items():
                if p >= 0:
                    out.add((min(x, p), max(x, p)))
        return out

    def ledger(self) -> dict[str, int]:
        return {
            "edges": 0,
            "path_entries": 0,
            "link_entries": self.table.cluster_size(),
            "tables": self.g.n * self.hierarchy.depth,
        }


def tz_probabilities(n: int, k: int) -> list[float]:
    return [n ** (-1.0 / k) if n > 0 else 0.0] * k


def build_tz(g: WeightedGraph, k: int, seed: int | None = 0) -> TZOracle:
    limit = math.ceil(math.log2(g.n)) + 1 if g.n > 1 else 1
    if not 1 <= k <= limit:
        raise ValueError(f"k must lie in [1, {limit}] for n={g.n}, got {k}")
    hierarchy = sample_hierarchy(g.n, tz_probabilities(g.n, k), seed)
    return TZOracle(g, k, hierarchy)


def tz_query(oracle: TZOracle, u: int, v: int) -> PathRecord | Unreachable:
    return oracle.query(u, v)


class TZEmulator:
    """Emulator over a vertex subset A: edges (u, w) for every w in B(u).

    Edge weights are the exact distances between the endpoints.  A query
    returns the two-edge emulator route u -> w -> v through the meeting pivot
    (one edge when w is an endpoint).
    """

    def __init__(self, points: Sequence[int], metric: WeightedGraph, oracle: TZOracle):
        self.points = tuple(points)
        self.local = {x: i for i, x in enumerate(self.points)}
        self.metric = metric
        self.oracle = oracle
        edges = {}
        for u, bunch in enumerate(oracle.table.bunch):
            for w, d in bunch.items():
                if w != u:
                    a, b = self.points[u], self.points[w]
                    edges[(min(a, b), max(a, b))] = d
        self.edges: dict[tuple[int, int], float] = dict(sorted(edges.items()))

    @property
    def declared_stretch(self) -> int:
        return self.oracle.declared_stretch

    def query(self, a: int, b: int) -> tuple[list[int], float]:
        """Emulator route between two points of A, as (global ids, weight)."""
        if a == b:
            return [a], 0
        u, v = self.local[a], self.local[b]
        x, y, w, swapped = self.oracle.meeting_point(u, v)
        route = [x, w, y] if w not in (x, y) else [x, y]
        if swapped:
            route.reverse()
        weight = self.metric_weight(route)
        return [self.points[i] for i in route], weight

    def metric_weight(self, route: Sequence[int]) -> float:
        return sum(self.metric.weight(s, t) for s, t in zip(route, route[1:]))

    def ledger(self) -> dict[str, int]:
        return {"edges": len(self.edges), "path_entries": 0, "link_entries": 0,
                "tables": self.oracle.table.bunch_size() + len(self.points) * self.oracle.hierarchy.depth}


def tz_emulator(
    points: Sequence[int],
    dist: Sequence[Sequence[float]],
    k: int,
    seed: int | None = 0,
    tolerance: float = 1e-9,
) -> TZEmulator:
    """Build the emulator over ``points`` from their pairwise distance matrix.

    ``dist[i][j]`` is the distance between points[i] and points[j]; it must be
    a metric (checked, with a relative tolerance for float weights).
    """
    size = len(points)
    if size == 0:
        raise ValueError("emulator needs at least one point")
    matrix = np.array(dist, dtype=np.float64).reshape(size, size)
    off = ~np.eye(size, dtype=bool)
    if (np.diag(matrix) != 0).any():
        raise ValueError("distance from a point to itself must be 0")
    if not (np.isfinite(matrix[off]).all() and (matrix[off] > 0).all()):
        raise ValueError("points must lie at positive finite distances")
    slack = tolerance * (matrix.max() or 1.0)
    if (np.abs(matrix - matrix.T) > slack).any():
        raise ValueError("distance matrix is not symmetric")
    for m in range(size):
        bad = np.argwhere(matrix > matrix[:, m:m + 1] + matrix[m:m + 1, :] + slack)
        if len(bad):
            i, j = bad[0]
            raise ValueError(
                f"triangle inequality fails: d({points[i]},{points[j]}) > "
                f"d({points[i]},{points[m]}) + d({points[m]},{points[j]})"
            )
    metric = WeightedGraph(size, [(i, j, dist[i][j]) for i in range(size) for j in range(i + 1, size)])
    oracle = TZOracle(metric, k, sample_hierarchy(size, tz_probabilities(size, k), seed))
    return TZEmulator(points, metric, oracle)
