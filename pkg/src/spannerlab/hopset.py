"""Hopsets built from a λ-scheduled sample hierarchy, with exact preservers.

The hopset H is split into three disjoint parts:

* ``h1``: pivot edges (u, p_i(u));
* ``h2``: bunch edges of the first c levels (every vertex takes part);
* ``h3``: bunch edges of the remaining levels (only sampled vertices).

An unordered pair that qualifies for several parts is kept in the first one
only.  H1 and H2 pairs can be answered exactly by two link families (the
pivot forests and the low-level cluster trees); H3 pairs need a separate
pairwise structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import ExactOracle, PathRecord, WeightedGraph
from .tz import BunchTable, PivotTable, SampleHierarchy, sample_hierarchy


def level_count(c: int, k: int) -> int:
    """F = c * ceil(log_{c+1}(k+1)), computed with integers."""
    a = 0
    while (c + 1) ** a < k + 1:
        a += 1
    return c * a


@dataclass(frozen=True)
class LambdaSchedule:
    c: int
    k: int
    F: int
    lam: tuple[int, ...]

    def f(self, i: int) -> int:
        """Round i up to the last level of its block of c levels."""
        return (i // self.c) * self.c + self.c - 1

    def f_inv(self, i: int) -> int:
        """First level of i's block."""
        return (i // self.c) * self.c

    @property
    def stretch_bound(self) -> int:
        return 8 * self.c + 3

    @property
    def hop_budget(self) -> int:
        c, F = self.c, self.F
        exact = Fraction(c + 1, c) ** F * (2 * c + 2) ** (2 * (F // c))
        return math.ceil(exact)


def lambda_schedule(c: int, k: int) -> LambdaSchedule:
    if not 1 < c <= k:
        raise ValueError(f"need 1 < c <= k, got c={c}, k={k}")
    F = level_count(c, k)
    lam: list[int] = []
    for i in range(F):
        lam.append(1 + sum(lam[: (i // c) * c]))
    for i, value in enumerate(lam):
        if value != (c + 1) ** (i // c):
            raise AssertionError(f"λ recurrence disagrees with closed form at i={i}")
    return LambdaSchedule(c, k, F, tuple(lam))


def default_delta(c: int, k: int) -> float:
    return k ** (-9 / (c - 1))


@dataclass
class HopsetParts:
    """The three hopset parts plus everything needed to preserve H1 and H2.

    ``h1`` maps a pair key to (u, i): the edge joins u and p_i(u).
    ``h2``/``h3`` map a pair key to (u, v, j): v lies in B_j(u).
    Weights are in ``weights``; each equals the exact graph distance.
    """

    schedule: LambdaSchedule
    delta: float
    hierarchy: SampleHierarchy
    pivots: PivotTable
    table: BunchTable
    h1: dict[tuple[int, int], tuple[int, int]]
    h2: dict[tuple[int, int], tuple[int, int, int]]
    h3: dict[tuple[int, int], tuple[int, int, int]]
    weights: dict[tuple[int, int], float] = field(repr=False)

    def edges(self, parts: str = "123") -> list[tuple[int, int, float]]:
        chosen = {"1": self.h1, "2": self.h2, "3": self.h3}
        return [(a, b, self.weights[(a, b)]) for p in parts for (a, b) in chosen[p]]

    def part_of(self, a: int, b: int) -> str | None:
        key = (min(a, b), max(a, b))
        for name, part in (("h1", self.h1), ("h2", self.h2), ("h3", self.h3)):
            if key in part:
                return name
        return None

    def h1_route(self, i: int, u: int) -> list[int]:
        """u -> p_i(u) along the pivot forest of level i."""
        return self.pivots.route(i, u)

    def h2_route(self, j: int, v: int, u: int) -> list[int]:
        """u -> v along the cluster tree of v (v a level-j centre, j < c)."""
        if j >= self.schedule.c:
            raise NotPreserved(u, v)
        cluster = self.table.clusters.get(v)
        if cluster is None or cluster.level != j or u not in cluster:
            raise NotPreserved(u, v)
        return cluster.route(u)

    def h1_links(self) -> int:
        return sum(
            1
            for i in range(self.hierarchy.depth)
            for x in range(len(self.pivots.pivot[i]))
            if self.pivots.pivot[i][x] >= 0 and self.pivots.link(i, x) >= 0
        )

    def h2_links(self) -> int:
        c = self.schedule.c
        return sum(len(cl) - 1 for cl in self.table.clusters.values() if cl.level < c)

    def forest_edges(self) -> set[tuple[int, int]]:
        """Graph edges used by the H1 and H2 link families."""
        out = set()
        for i in range(self.hierarchy.depth):
            for x in range(len(self.pivots.pivot[i])):
                if self.pivots.pivot[i][x] >= 0:
                    y = self.pivots.link(i, x)
                    if y >= 0:
                        out.add((min(x, y), max(x, y)))
        for cl in self.table.clusters.values():
            if cl.level < self.schedule.c:
                for x, y in cl.parent.items():
                    if y >= 0:
                        out.add((min(x, y), max(x, y)))
        return out

    def sizes(self) -> dict[str, int]:
        return {
            "h1": len(self.h1),
            "h2": len(self.h2),
            "h3": len(self.h3),
            "preserver_links": self.h1_links() + self.h2_links(),
        }


class NotPreserved(KeyError):
    def __init__(self, u: int, v: int):
        super().__init__(f"pair ({u}, {v}) is not preserved by the H1/H2 forests")
        self.u, self.v = u, v


def build_hopset(
    g: WeightedGraph,
    c: int,
    k: int,
    delta: float | None = None,
    seed: int | None = 0,
) -> HopsetParts:
    schedule = lambda_schedule(c, k)
    if delta is None:
        delta = default_delta(c, k)
    if not 0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    n = g.n
    probabilities = [delta * n ** (-lam / k) for lam in schedule.lam]
    hierarchy = sample_hierarchy(n, probabilities, seed)
    pivots = PivotTable(g, hierarchy)
    table = BunchTable(g, hierarchy, pivots)

    h1: dict[tuple[int, int], tuple[int, int]] = {}
    h2: dict[tuple[int, int], tuple[int, int, int]] = {}
    h3: dict[tuple[int, int], tuple[int, int, int]] = {}
    weights: dict[tuple[int, int], float] = {}
    for i in range(hierarchy.depth):
        for u in range(n):
            p = pivots.pivot[i][u]
            if p >= 0 and p != u:
                key = (min(u, p), max(u, p))
                if key not in h1:
                    h1[key] = (u, i)
                    weights[key] = pivots.dist[i][u]
    for v, cluster in table.clusters.items():
        j = cluster.level
        members = hierarchy.level(schedule.f_inv(j))
        target = h2 if j < c else h3
        for u, d in cluster.dist.items():
            if u == v or u not in members:
                continue
            key = (min(u, v), max(u, v))
            if key in h1 or key in h2 or key in h3:
                continue
            target[key] = (u, v, j)
            weights[key] = d
    # deterministic order: sort each part by key
    h1 = dict(sorted(h1.items()))
    h2 = dict(sorted(h2.items()))
    h3 = dict(sorted(h3.items()))
    return HopsetParts(schedule, delta, hierarchy, pivots, table, h1, h2, h3, weights)


def preserver_path(parts: HopsetParts, g: WeightedGraph, u: int, v: int) -> PathRecord:
    """Exact u-v path for an H1 or H2 pair, read from the link families."""
    key = (min(u, v), max(u, v))
    if key in parts.h1:
        a, i = parts.h1[key]
        route = parts.h1_route(i, a)
    elif key in parts.h2:
        a, b, j = parts.h2[key]
        route = parts.h2_route(j, b, a)
    else:
        raise NotPreserved(u, v)
    if route[0] != u:
        route.reverse()
    return PathRecord.along(g, route)


def hop_limited_distances(
    n: int,
    edges: list[tuple[int, int, float]],
    sources: list[int],
    beta: int,
    batch_cells: int = 4_000_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Synchronous Bellman-Ford from many sources at once, at most ``beta`` rounds.

    Returns (dist, hops) arrays of shape (len(sources), n): the lightest walk
    with at most ``beta`` edges, and the fewest edges achieving that weight.
    Unreached entries are inf.
    """
    src = np.array([a for a, b, _ in edges] + [b for a, b, _ in edges], dtype=np.int64)
    dst = np.array([b for a, b, _ in edges] + [a for a, b, _ in edges], dtype=np.int64)
    wts = np.array([w for *_, w in edges] * 2, dtype=np.float64)
    order = np.argsort(dst, kind="stable")
    src, dst, wts = src[order], dst[order], wts[order]
    targets, starts = np.unique(dst, return_index=True)
    dist = np.full((len(sources), n), np.inf)
    hops = np.zeros((len(sources), n), dtype=np.int64)
    if not len(sources):
        return dist, hops
    rows = max(1, batch_cells // max(len(src), 1))
    rounds = min(beta, max(n - 1, 1))
    for lo in range(0, len(sources), rows):
        block = np.full((min(rows, len(sources) - lo), n), np.inf)
        block_hops = np.zeros(block.shape, dtype=np.int64)
        block[np.arange(block.shape[0]), sources[lo:lo + rows]] = 0.0
        if len(src):
            for rnd in range(1, rounds + 1):
                cand = np.minimum.reduceat(block[:, src] + wts, starts, axis=1)
                current = block[:, targets]
                better = cand < current
                if not better.any():
                    break
                block[:, targets] = np.where(better, cand, current)
                block_hops[:, targets] = np.where(better, rnd, block_hops[:, targets])
        dist[lo:lo + rows] = block
        hops[lo:lo + rows] = block_hops
    return dist, hops


def verify_hopset(
    g: WeightedGraph,
    parts: HopsetParts,
    pairs,
    exact: ExactOracle | None = None,
) -> dict:
    """Check d_G(u,v) <= d^(β)_{G∪H}(u,v) <= (8c+3) d_G(u,v) for every pair.

    Returns a report with the worst observed stretch and hop count; any
    violation is listed with its witness pair and makes ``ok`` false.
    """
    exact = exact or ExactOracle(g)
    schedule = parts.schedule
    beta = schedule.hop_budget
    bound = schedule.stretch_bound
    pairs = list(pairs)
    sources = sorted({u for u, _ in pairs})
    row = {s: i for i, s in enumerate(sources)}
    all_edges = list(g.edges) + parts.edges()
    dist, hops = hop_limited_distances(g.n, all_edges, sources, beta)
    worst, worst_pair, max_hops = 1.0, None, 0
    violations = []
    for u, v in pairs:
        d = exact.distance(u, v)
        if d is None:
            raise ValueError(f"pair ({u}, {v}) is disconnected")
        got = float(dist[row[u], v])
        h = int(hops[row[u], v])
        ratio = got / d
        if ratio > worst:
            worst, worst_pair = ratio, (u, v)
        max_hops = max(max_hops, h)
        if got > bound * d * (1 + 1e-12) or h > beta or got < d * (1 - 1e-12):
            violations.append({"pair": [u, v], "distance": d, "hop_limited": got, "hops": h})
    return {
        "stretch_bound": bound,
        "beta_budget": beta,
        "F": schedule.F,
        "levels_used": parts.hierarchy.depth,
        "pairs": len(pairs),
        "worst_stretch": worst,
        "worst_pair": list(worst_pair) if worst_pair else None,
        "max_hops": max_hops,
        "sizes": parts.sizes(),
        "violations": violations,
        "ok": not violations,
    }


def check_h1_consistency(parts: HopsetParts) -> list[tuple[int, int, int]]:
    """Vertices x on a stored u -> p_i(u) route with p_i(x) != p_i(u)."""
    bad = []
    for i in range(parts.hierarchy.depth):
        piv = parts.pivots.pivot[i]
        for u in range(len(piv)):
            if piv[u] < 0:
                continue
            for x in parts.h1_route(i, u):
                if piv[x] != piv[u]:
                    bad.append((i, u, x))
    return bad


def check_h2_consistency(parts: HopsetParts) -> list[tuple[int, int, int]]:
    """Vertices x on a stored u -> v cluster route that fall outside C(v)."""
    bad = []
    for v, cluster in parts.table.clusters.items():
        if cluster.level >= parts.schedule.c:
            continue
        for u in cluster.parent:
            for x in cluster.route(u):
                if x not in cluster:
                    bad.append((cluster.level, v, x))
    return bad

