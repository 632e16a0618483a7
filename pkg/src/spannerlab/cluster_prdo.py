"""Linear-size path-reporting oracles built on vertex clusterings.

Both oracles contract G into a cluster graph, run a Thorup-Zwick oracle on
it, and turn the returned cluster route back into a G-path by walking inside
cluster trees between consecutive witness edges.

* unweighted: clusters of radius <= k peeled off a BFS tree;
* weighted: a hierarchy of forests, each level merging Borůvka stars of the
  previous level's trees.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .graph import PathRecord, Unreachable, WeightedGraph
from .tz import TZOracle, sample_hierarchy, tz_probabilities


def tree_route(parent: Sequence[int] | Mapping[int, int], height: Sequence[int] | Mapping[int, int], a: int, b: int) -> list[int]:
    """Unique tree path from a to b: repeatedly lift the deeper endpoint."""
    left, right = [a], [b]
    while a != b:
        if height[a] > height[b]:
            a = parent[a]
            if a < 0:
                raise ValueError("endpoints lie in different trees")
            left.append(a)
        else:
            b = parent[b]
            if b < 0:
                raise ValueError("endpoints lie in different trees")
            right.append(b)
    return left + right[-2::-1]


@dataclass
class Clustering:
    """Vertex partition; each part carries a spanning tree (parent links, heights)."""

    cluster_of: list[int]
    roots: list[int]
    parent: list[int]
    height: list[int]

    @property
    def count(self) -> int:
        return len(self.roots)

    def members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.roots]
        for x, c in enumerate(self.cluster_of):
            out[c].append(x)
        return out

    def radius(self) -> int:
        return max(self.height, default=0)


def unweighted_clustering(g: WeightedGraph, k: int) -> Clustering:
    """Peel subtrees of height exactly k off a BFS tree, deepest first.

    Each peeled cluster has at least k+1 vertices; whatever remains around the
    BFS root forms the last cluster of its component.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = g.n
    cluster_of = [-1] * n
    roots: list[int] = []
    parent = [-1] * n
    height = [0] * n
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        depth = {start: 0}
        bfs_parent = {start: -1}
        children: dict[int, list[int]] = {start: []}
        seen[start] = True
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in g.neighbors(x):
                if not seen[y]:
                    seen[y] = True
                    depth[y] = depth[x] + 1
                    bfs_parent[y] = x
                    children[y] = []
                    children[x].append(y)
                    queue.append(y)
        removed: set[int] = set()
        for v in sorted(depth, key=lambda x: (-depth[x], x)):
            if v in removed:
                continue
            if depth[v] <= k:
                break
            top = v
            for _ in range(k):
                top = bfs_parent[top]
            cid = len(roots)
            roots.append(top)
            stack = [top]
            while stack:
                x = stack.pop()
                removed.add(x)
                cluster_of[x] = cid
                parent[x] = -1 if x == top else bfs_parent[x]
                height[x] = depth[x] - depth[top]
                stack.extend(y for y in children[x] if y not in removed)
        cid = len(roots)
        roots.append(start)
        for x in depth:
            if x not in removed:
                cluster_of[x] = cid
                parent[x] = bfs_parent[x]
                height[x] = depth[x]
    return Clustering(cluster_of, roots, parent, height)


@dataclass
class ClusterGraph:
    """Contracted graph: one vertex per cluster, witness edge per cluster pair."""

    graph: WeightedGraph
    witness: dict[tuple[int, int], tuple[int, int, float]]

    def crossing(self, s: int, t: int) -> tuple[int, int]:
        """Witness edge (x, y) of clusters s, t with x in s and y in t."""
        a, b, _ = self.witness[(min(s, t), max(s, t))]
        return (a, b) if s < t else (b, a)


def cluster_graph(g: WeightedGraph, cluster_of: Sequence[int], count: int) -> ClusterGraph:
    """Lightest crossing edge per cluster pair, ties by (min id, max id)."""
    best: dict[tuple[int, int], tuple] = {}
    for u, v, w in g.edges:
        s, t = cluster_of[u], cluster_of[v]
        if s == t:
            continue
        key = (min(s, t), max(s, t))
        cand = (w, min(u, v), max(u, v))
        if key not in best or cand < best[key]:
            best[key] = cand
    witness = {}
    edges = []
    for (s, t), (w, a, b) in sorted(best.items()):
        x, y = (a, b) if cluster_of[a] == s else (b, a)
        witness[(s, t)] = (x, y, w)
        edges.append((s, t, w))
    return ClusterGraph(WeightedGraph(count, edges), witness)


def loop_erase(route: Sequence[int]) -> list[int]:
    out: list[int] = []
    where: dict[int, int] = {}
    for x in route:
        if x in where:
            cut = where[x]
            for y in out[cut + 1:]:
                del where[y]
            del out[cut + 1:]
        else:
            where[x] = len(out)
            out.append(x)
    return out


def _cluster_tz(h: WeightedGraph, k: int, seed: int | None) -> TZOracle:
    # a cluster graph can be far smaller than G; cap k at the oracle's range
    cap = math.ceil(math.log2(h.n)) + 1 if h.n > 1 else 1
    k_eff = max(1, min(k, cap))
    return TZOracle(h, k_eff, sample_hierarchy(h.n, tz_probabilities(h.n, k_eff), seed))


@dataclass
class Extraction:
    path: PathRecord
    cluster_route: list[int]
    route_weight: float


class ClusterPRDO:
    """TZ on a cluster graph, expanded through cluster trees and witness edges."""

    def __init__(self, g: WeightedGraph, k: int, mode: str, cluster_of, parent, height,
                 clusters: ClusterGraph, oracle: TZOracle, levels: int = 0, tree_counts=None):
        self.kind = f"cluster-{mode}"
        self.g = g
        self.k = k
        self.mode = mode
        self.cluster_of = cluster_of
        self.parent = parent
        self.height = height
        self.clusters = clusters
        self.oracle = oracle
        self.levels = levels
        self.tree_counts = tree_counts or [len(set(cluster_of))]
        self._component = g.components()

    @property
    def declared_stretch(self) -> float:
        if self.mode == "unweighted":
            return 2 * self.k * (2 * self.k + 1)
        return self.k ** math.log(4, 4 / 3)

    def extract(self, u: int, v: int) -> Extraction:
        if self._component[u] != self._component[v]:
            raise ValueError(f"{u} and {v} are disconnected")
        s, t = self.cluster_of[u], self.cluster_of[v]
        if s == t:
            route = [s]
        else:
            q = self.oracle.query(s, t)
            route = loop_erase(q.vertices)
        pieces: list[int] = []
        entry = u
        q_weight = 0
        for a, b in zip(route, route[1:]):
            x, y = self.clusters.crossing(a, b)
            q_weight += self.clusters.graph.weight(a, b)
            pieces.extend(tree_route(self.parent, self.height, entry, x)[bool(pieces):])
            entry = y
            pieces.append(y)
        tail = tree_route(self.parent, self.height, entry, v)
        pieces.extend(tail[1:] if pieces else tail)
        return Extraction(PathRecord.along(self.g, pieces), route, q_weight)

    def query(self, u: int, v: int) -> PathRecord | Unreachable:
        if self._component[u] != self._component[v]:
            return Unreachable(u, v)
        return self.extract(u, v).path

    def spanner_edges(self) -> set[tuple[int, int]]:
        out = {(min(x, p), max(x, p)) for x, p in enumerate(self.parent) if p >= 0}
        for s, t in self.oracle.spanner_edges():
            a, b = self.clusters.crossing(s, t)
            out.add((min(a, b), max(a, b)))
        return out

    def ledger(self) -> dict[str, int]:
        tz = self.oracle.ledger()
        return {
            "edges": len(self.oracle.spanner_edges()),
            "path_entries": 0,
            "link_entries": tz["link_entries"] + sum(1 for p in self.parent if p >= 0),
            "tables": tz["tables"] + 2 * self.g.n,
        }


def build_unweighted_prdo(g: WeightedGraph, k: int, seed: int | None = 0) -> ClusterPRDO:
    if not g.unit_weight:
        raise ValueError("the unweighted oracle needs unit edge weights")
    clustering = unweighted_clustering(g, k)
    clusters = cluster_graph(g, clustering.cluster_of, clustering.count)
    oracle = _cluster_tz(clusters.graph, k, seed)
    return ClusterPRDO(g, k, "unweighted", clustering.cluster_of, clustering.parent,
                       clustering.height, clusters, oracle, tree_counts=[clustering.count])


@dataclass
class StarPartition:
    """One partial-Borůvka round on a graph whose vertices are trees."""

    lightest: list[tuple | None]
    root: list[int]
    height: list[int]
    center: list[int]
    kept_parity: int

    @property
    def star_count(self) -> int:
        return sum(1 for x, c in enumerate(self.center) if c == x)


def boruvka_star_round(h: WeightedGraph) -> StarPartition:
    """Lightest edge per vertex, parity split of the forest, stars kept.

    Ties between edges of equal weight go by (weight, min id, max id).  Each
    Borůvka tree is rooted at the smaller endpoint of its lightest edge; the
    larger of the two parity classes (the even class on a tie) becomes the set
    of star edges, centred at their endpoint closer to the root.
    """
    n = h.n
    lightest: list[tuple | None] = [None] * n
    for x in range(n):
        for y, w, _ in h.adjacency[x]:
            cand = (w, min(x, y), max(x, y))
            if lightest[x] is None or cand < lightest[x]:
                lightest[x] = cand
    chosen = {(e[1], e[2]) for e in lightest if e is not None}
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for a, b in sorted(chosen):
        adjacency[a].append(b)
        adjacency[b].append(a)
    root = [-1] * n
    height = [0] * n
    parent = [-1] * n
    for x in range(n):
        if root[x] >= 0:
            continue
        e = lightest[x]
        start = x
        if e is not None:
            # walk along lightest edges until the mutually chosen one
            cur = x
            visited = set()
            while cur not in visited:
                visited.add(cur)
                w, a, b = lightest[cur]
                cur = b if a == cur else a
            w, a, b = lightest[cur]
            start = min(a, b)
        if root[start] >= 0:
            continue
        root[start] = start
        queue = deque([start])
        while queue:
            y = queue.popleft()
            for z in adjacency[y]:
                if root[z] < 0:
                    root[z] = start
                    parent[z] = y
                    height[z] = height[y] + 1
                    queue.append(z)
    even = [(a, b) for a, b in chosen if min(height[a], height[b]) % 2 == 0]
    odd = [(a, b) for a, b in chosen if min(height[a], height[b]) % 2 == 1]
    kept, parity = (even, 0) if len(even) >= len(odd) else (odd, 1)
    center = list(range(n))
    for a, b in kept:
        child = a if parent[a] == b else b
        center[child] = parent[child]
    return StarPartition(lightest, root, height, center, parity)


@dataclass
class ForestLevel:
    tree_of: list[int]
    parent: list[int]
    height: list[int]

    @property
    def tree_count(self) -> int:
        return len(set(self.tree_of))


class ForestHierarchy:
    """Forests F_0 ⊆ F_1 ⊆ ... ; F_{i+1} merges the Borůvka stars of F_i's trees."""

    def __init__(self, g: WeightedGraph, levels: int):
        n = g.n
        self.g = g
        self.levels: list[ForestLevel] = [ForestLevel(list(range(n)), [-1] * n, [0] * n)]
        self.rounds: list[StarPartition] = []
        self.cluster_graphs: list[ClusterGraph] = []
        forest_adj: list[set[int]] = [set() for _ in range(n)]
        for _ in range(levels):
            cur = self.levels[-1]
            ids = sorted(set(cur.tree_of))
            index = {r: i for i, r in enumerate(ids)}
            local = [index[r] for r in cur.tree_of]
            clusters = cluster_graph(g, local, len(ids))
            stars = boruvka_star_round(clusters.graph)
            self.cluster_graphs.append(clusters)
            self.rounds.append(stars)
            for t, c in enumerate(stars.center):
                if c != t:
                    x, y = clusters.crossing(t, c)
                    forest_adj[x].add(y)
                    forest_adj[y].add(x)
            tree_of = [-1] * n
            parent = [-1] * n
            height = [0] * n
            for t, c in enumerate(stars.center):
                if c != t:
                    continue
                r = ids[t]
                tree_of[r] = r
                queue = deque([r])
                while queue:
                    x = queue.popleft()
                    for y in sorted(forest_adj[x]):
                        if tree_of[y] < 0:
                            tree_of[y] = r
                            parent[y] = x
                            height[y] = height[x] + 1
                            queue.append(y)
            self.levels.append(ForestLevel(tree_of, parent, height))
        self.forest_adj = forest_adj

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def tree_counts(self) -> list[int]:
        return [lvl.tree_count for lvl in self.levels]

    def route(self, i: int, a: int, b: int) -> list[int]:
        lvl = self.levels[i]
        return tree_route(lvl.parent, lvl.height, a, b)


def hierarchy_depth(k: int) -> int:
    """l = floor(log_{4/3} k) - 2, clamped at 0 (exact rational comparison)."""
    a = 0
    while Fraction(4, 3) ** (a + 1) <= k:
        a += 1
    return max(0, a - 2)


def build_weighted_prdo(g: WeightedGraph, k: int, seed: int | None = 0) -> ClusterPRDO:
    if k < 1:
        raise ValueError("k must be at least 1")
    levels = hierarchy_depth(k)
    hierarchy = ForestHierarchy(g, levels)
    top = hierarchy.levels[-1]
    ids = sorted(set(top.tree_of))
    index = {r: i for i, r in enumerate(ids)}
    cluster_of = [index[r] for r in top.tree_of]
    clusters = cluster_graph(g, cluster_of, len(ids))
    oracle = _cluster_tz(clusters.graph, k, seed)
    prdo = ClusterPRDO(g, k, "weighted", cluster_of, top.parent, top.height, clusters, oracle,
                       levels=levels, tree_counts=hierarchy.tree_counts())
    prdo.hierarchy = hierarchy
    return prdo
