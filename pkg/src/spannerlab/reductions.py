"""Subset, source-wise and prioritized path-reporting spanners.

Each layer reuses the one below it:

* subset: an emulator over A (exact distances as weights) whose edges are
  then preserved in G by a pairwise oracle; an emulator route is expanded
  edge by edge;
* source-wise: every vertex walks to its nearest source p(v) first, then asks
  the subset oracle for p(v) -> a;
* prioritized: nested prefixes of the ranking, one source-wise oracle per
  prefix, with a global oracle for the vertices no prefix covers.
"""
from __future__ import annotations

import math
from typing import Sequence

from .graph import ExactOracle, PathRecord, WeightedGraph, join_walks, search_forest
from .pairwise import PairNotRegistered, exact_preserver
from .tz import TZEmulator, build_tz, tz_emulator


class SubsetOracle:
    kind = "subset"

    def __init__(self, g: WeightedGraph, points: Sequence[int], emulator: TZEmulator, preserver):
        self.g = g
        self.points = tuple(points)
        self.members = frozenset(points)
        self.emulator = emulator
        self.preserver = preserver

    @property
    def declared_stretch(self) -> int:
        return self.emulator.declared_stretch * self.preserver.declared_stretch

    def query(self, a: int, b: int) -> PathRecord:
        if a not in self.members or b not in self.members:
            raise PairNotRegistered(a, b)
        if a == b:
            return PathRecord((a,), 0)
        route, _ = self.emulator.query(a, b)
        return join_walks(self.g, [self.preserver.route(x, y) for x, y in zip(route, route[1:])])

    def spanner_edges(self) -> set[tuple[int, int]]:
        return self.preserver.spanner_edges()

    def ledger(self) -> dict[str, int]:
        e, p = self.emulator.ledger(), self.preserver.ledger()
        return {key: e[key] + p[key] for key in e}


def subset_spanner(
    g: WeightedGraph,
    points: Sequence[int],
    k_emulator: int,
    seed: int | None = 0,
    exact: ExactOracle | None = None,
) -> SubsetOracle:
    points = sorted(set(points))
    if not points:
        raise ValueError("subset must be nonempty")
    exact = exact or ExactOracle(g)
    dist = [[exact.distance(a, b) for b in points] for a in points]
    if any(d is None for row in dist for d in row):
        raise ValueError("subset spans several components")
    emulator = tz_emulator(points, dist, k_emulator, seed)
    preserver = exact_preserver(g, list(emulator.edges), exact)
    return SubsetOracle(g, points, emulator, preserver)


class SourcewiseOracle:
    """Answers (v, a) for any vertex v and source a ∈ A."""

    kind = "sourcewise"

    def __init__(self, g: WeightedGraph, subset: SubsetOracle):
        self.g = g
        self.subset = subset
        self.forest = search_forest(g, subset.points)

    @property
    def declared_stretch(self) -> int:
        return 2 * self.subset.declared_stretch + 1

    def nearest(self, v: int) -> int:
        return self.forest.root[v]

    def query(self, u: int, v: int) -> PathRecord:
        """Route between u and v; at least one of them must be a source."""
        members = self.subset.members
        if v in members:
            return self._towards(u, v)
        if u in members:
            return self._towards(v, u).reversed()
        raise PairNotRegistered(u, v)

    def _towards(self, v: int, a: int) -> PathRecord:
        if not self.forest.reached(v):
            raise PairNotRegistered(v, a)
        hub = self.forest.root[v]
        first = self.forest.route(v)
        rest = self.subset.query(hub, a)
        return join_walks(self.g, [first, rest.vertices])

    def spanner_edges(self) -> set[tuple[int, int]]:
        out = set(self.subset.spanner_edges())
        for x, p in enumerate(self.forest.parent):
            if p >= 0:
                out.add((min(x, p), max(x, p)))
        return out

    def ledger(self) -> dict[str, int]:
        base = dict(self.subset.ledger())
        base["link_entries"] += sum(1 for p in self.forest.parent if p >= 0)
        base["tables"] += self.g.n
        return base


def sourcewise_spanner(g: WeightedGraph, subset: SubsetOracle) -> SourcewiseOracle:
    return SourcewiseOracle(g, subset)


def _floor_power(n: int, num: int, den: int) -> int:
    """floor(n ** (num/den)) in exact integer arithmetic."""
    target = n ** num
    x = int(round(n ** (num / den)))
    while x ** den > target:
        x -= 1
    while (x + 1) ** den <= target:
        x += 1
    return x


def prefix_function(n: int, preset: str, i: int) -> int:
    """Prefix size f(i): pow2 gives floor(n^(1-1/2^i)), harmonic floor(n^(1-1/i))."""
    if i < 1:
        raise ValueError("prefix index starts at 1")
    if preset == "pow2":
        return _floor_power(n, 2 ** i - 1, 2 ** i)
    if preset == "harmonic":
        return _floor_power(n, i - 1, i)
    raise ValueError(f"unknown preset {preset!r}")


def default_prefix_count(n: int) -> int:
    return max(1, math.ceil(math.log2(max(math.log2(max(n, 2)), 1.0))))


def prefix_k(size: int, n: int) -> int:
    """Emulator parameter for a prefix: ceil(log|A| / (log n - log|A|)), at least 1."""
    if size <= 1:
        return 1
    ratio = math.log(size) / (math.log(n) - math.log(size))
    return max(1, math.ceil(ratio - 1e-9))


class PrioritizedOracle:
    kind = "prioritized"

    def __init__(
        self,
        g: WeightedGraph,
        ranking: Sequence[int],
        preset: str,
        T: int,
        prefixes: list[SourcewiseOracle],
        sizes: list[int],
        fallback,
    ):
        self.g = g
        self.ranking = tuple(ranking)
        self.rank = {v: j for j, v in enumerate(self.ranking, start=1)}
        self.preset = preset
        self.T = T
        self.prefixes = prefixes
        self.sizes = sizes
        self.fallback = fallback
        covered = sizes[-1] if sizes else 0
        # f_inv[j] = min{i : f(i) >= j}, stored for every rank j (0 = uncovered)
        self.f_inv = [0] * (g.n + 1)
        i = 0
        for j in range(1, covered + 1):
            while sizes[i] < j:
                i += 1
            self.f_inv[j] = i + 1

    @property
    def covered(self) -> int:
        return self.sizes[-1] if self.sizes else 0

    def stretch_for_rank(self, j: int) -> int:
        if j <= self.covered:
            return self.prefixes[self.f_inv[j] - 1].declared_stretch
        return self.fallback.declared_stretch

    def stretch_table(self) -> list[dict]:
        """Declared stretch by rank range."""
        rows = []
        lo = 1
        for i, size in enumerate(self.sizes, start=1):
            rows.append({"ranks": [lo, size], "prefix": i, "k": self.prefixes[i - 1].subset.emulator.oracle.k,
                         "declared_stretch": self.prefixes[i - 1].declared_stretch})
            lo = size + 1
        if lo <= self.g.n:
            rows.append({"ranks": [lo, self.g.n], "prefix": None, "k": self.fallback.k,
                         "declared_stretch": self.fallback.declared_stretch})
        return rows

    def dispatch(self, u: int, v: int) -> tuple[int, int | None]:
        """(j, prefix index) for the query: j is the better rank of the two."""
        j = min(self.rank[u], self.rank[v])
        return j, (self.f_inv[j] if j <= self.covered else None)

    def query(self, u: int, v: int) -> PathRecord:
        if u == v:
            return PathRecord((u,), 0)
        _, i = self.dispatch(u, v)
        if i is None:
            return self.fallback.query(u, v)
        return self.prefixes[i - 1].query(u, v)

    def declared_for(self, u: int, v: int) -> int:
        return self.stretch_for_rank(min(self.rank[u], self.rank[v]))

    @property
    def declared_stretch(self) -> int:
        return max(self.stretch_for_rank(j) for j in range(1, self.g.n + 1))

    def spanner_edges(self) -> set[tuple[int, int]]:
        out = set(self.fallback.spanner_edges())
        for p in self.prefixes:
            out |= p.spanner_edges()
        return out

    def ledger(self) -> dict[str, int]:
        total = dict(self.fallback.ledger())
        for p in self.prefixes:
            for key, value in p.ledger().items():
                total[key] += value
        total["tables"] += self.g.n
        return total


def prioritized_spanner(
    g: WeightedGraph,
    ranking: Sequence[int],
    preset: str = "pow2",
    T: int | None = None,
    seed: int | None = 0,
    exact: ExactOracle | None = None,
) -> PrioritizedOracle:
    n = g.n
    if sorted(ranking) != list(range(n)):
        raise ValueError("ranking must be a permutation of the vertex ids")
    if T is None:
        T = default_prefix_count(n)
    sizes = [prefix_function(n, preset, i) for i in range(1, T + 1)]
    if any(b < a for a, b in zip(sizes, sizes[1:])) or (sizes and sizes[0] < 1):
        raise ValueError(f"prefix sizes {sizes} are not increasing")
    if sizes and sizes[-1] >= n:
        raise ValueError(f"f(T) = {sizes[-1]} must stay below n = {n}; lower T")
    exact = exact or ExactOracle(g)
    prefixes = []
    for i, size in enumerate(sizes, start=1):
        subset = subset_spanner(g, ranking[:size], prefix_k(size, n), None if seed is None else seed + i, exact)
        prefixes.append(sourcewise_spanner(g, subset))
    fallback = build_tz(g, max(1, math.ceil(math.log2(max(n, 2)))), seed)
    return PrioritizedOracle(g, ranking, preset, T, prefixes, sizes, fallback)

