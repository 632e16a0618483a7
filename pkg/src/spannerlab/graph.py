"""Weighted graphs, exact shortest paths, hop-bounded paths and girth.

Everything else in the package is checked against the searches in this
module, so they favour determinism over raw speed: every shortest-path tree
uses the same tie-break (a vertex points at its smallest-id neighbour that lies
on a shortest route to the root), which makes reported paths reproducible and
"consistent" in the sense that sub-paths of reported paths are reported paths.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

INF = math.inf


class GraphFormatError(ValueError):
    """A malformed graph or pair document, tagged with the offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


def _number(token: str) -> int | float:
    try:
        return int(token)
    except ValueError:
        return float(token)


class WeightedGraph:
    """Undirected graph with strictly positive edge weights.

    Parallel edges collapse to the lightest copy; edge ids follow the order in
    which each unordered pair first appears.  Integer weights stay Python ints,
    so graphs built from them are exact (no rounding anywhere).
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]]):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        index: dict[tuple[int, int], int] = {}
        kept: list[list] = []
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an id outside [0, {n})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not w > 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
            key = (u, v) if u < v else (v, u)
            if key in index:
                entry = kept[index[key]]
                if w < entry[2]:
                    entry[2] = w
            else:
                index[key] = len(kept)
                kept.append([key[0], key[1], w])
        self.edges: tuple[tuple[int, int, float], ...] = tuple(tuple(e) for e in kept)
        self._index = index
        adjacency: list[list[tuple[int, float, int]]] = [[] for _ in range(n)]
        for eid, (u, v, w) in enumerate(self.edges):
            adjacency[u].append((v, w, eid))
            adjacency[v].append((u, w, eid))
        for row in adjacency:
            row.sort()
        self.adjacency: tuple[tuple[tuple[int, float, int], ...], ...] = tuple(
            tuple(row) for row in adjacency
        )

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def integral(self) -> bool:
        return all(isinstance(w, int) for _, _, w in self.edges)

    @property
    def unit_weight(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._index

    def weight(self, u: int, v: int) -> float:
        return self.edges[self.edge_id(u, v)][2]

    def edge_id(self, u: int, v: int) -> int:
        try:
            return self._index[(u, v) if u < v else (v, u)]
        except KeyError:
            raise KeyError(f"no edge between {u} and {v}") from None

    def neighbors(self, u: int) -> list[int]:
        return [x for x, _, _ in self.adjacency[u]]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def without_edges(self, drop: Iterable[tuple[int, int]]) -> "WeightedGraph":
        gone = {(min(u, v), max(u, v)) for u, v in drop}
        return WeightedGraph(self.n, [e for e in self.edges if (e[0], e[1]) not in gone])

    def components(self) -> list[int]:
        """Component label per vertex (label = smallest vertex id in it)."""
        label = [-1] * self.n
        for s in range(self.n):
            if label[s] >= 0:
                continue
            label[s] = s
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y, _, _ in self.adjacency[x]:
                    if label[y] < 0:
                        label[y] = s
                        queue.append(y)
        return label

    def is_connected(self) -> bool:
        return self.n <= 1 or all(c == 0 for c in self.components())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeightedGraph) and self.n == other.n and self.edges == other.edges

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"


def load_graph(text: str) -> WeightedGraph:
    """Parse the edge-list format: a header ``n <count>`` then ``u v w`` lines."""
    n = None
    edges: list[tuple[int, int, int | float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphFormatError(lineno, "expected header 'n <count>'")
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFormatError(lineno, f"bad vertex count {parts[1]!r}") from None
            if n < 0:
                raise GraphFormatError(lineno, "negative vertex count")
            continue
        if len(parts) != 3:
            raise GraphFormatError(lineno, "expected 'u v w'")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = _number(parts[2])
        except ValueError:
            raise GraphFormatError(lineno, f"cannot parse {line!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(lineno, f"vertex id out of range [0, {n})")
        if u == v:
            raise GraphFormatError(lineno, f"self-loop at vertex {u}")
        if not (w > 0 and math.isfinite(w)):
            raise GraphFormatError(lineno, f"weight must be positive, got {parts[2]}")
        edges.append((u, v, w))
    if n is None:
        raise GraphFormatError(1, "missing header 'n <count>'")
    return WeightedGraph(n, edges)


def dump_graph(g: WeightedGraph) -> str:
    lines = [f"n {g.n}"]
    lines += [f"{u} {v} {w!r}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def read_graph(path) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return load_graph(fh.read())


@dataclass(frozen=True)
class PairSet:
    """Vertex pairs, deduplicated as unordered pairs, first orientation kept."""

    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> "PairSet":
        seen: set[tuple[int, int]] = set()
        kept = []
        for u, v in pairs:
            if u == v:
                raise ValueError(f"pair ({u}, {v}) repeats a vertex")
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                kept.append((u, v))
        return cls(tuple(kept))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def load_pairs(text: str, n: int | None = None) -> PairSet:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(lineno, "expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(lineno, f"cannot parse {line!r}") from None
        if n is not None and not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(lineno, f"vertex id out of range [0, {n})")
        if u == v:
            raise GraphFormatError(lineno, "pair repeats a vertex")
        pairs.append((u, v))
    return PairSet.of(pairs)


def dump_pairs(pairs: Iterable[tuple[int, int]]) -> str:
    return "".join(f"{u} {v}\n" for u, v in pairs)


@dataclass(frozen=True)
class PathRecord:
    """A reported route: ordered vertices, total weight and hop count.

    Routes may be walks; several oracles concatenate sub-routes without
    removing repeated vertices.  ``via_extra`` is only filled in for hop-bounded
    paths and marks hops that used an edge outside the graph.
    """

    vertices: tuple[int, ...]
    total_weight: float
    via_extra: tuple[bool, ...] | None = field(default=None, compare=False)

    @property
    def hop_count(self) -> int:
        return max(len(self.vertices) - 1, 0)

    @property
    def source(self) -> int:
        return self.vertices[0]

    @property
    def target(self) -> int:
        return self.vertices[-1]

    @classmethod
    def along(cls, g: WeightedGraph, vertices: Sequence[int]) -> "PathRecord":
        """Build a record for a walk in ``g``; raises KeyError on a non-edge."""
        total = 0
        for a, b in zip(vertices, vertices[1:]):
            total += g.weight(a, b)
        return cls(tuple(vertices), total)

    def reversed(self) -> "PathRecord":
        extra = None if self.via_extra is None else tuple(reversed(self.via_extra))
        return PathRecord(tuple(reversed(self.vertices)), self.total_weight, extra)

    def edges(self) -> list[tuple[int, int]]:
        return [(min(a, b), max(a, b)) for a, b in zip(self.vertices, self.vertices[1:])]

    def simplified(self) -> list[int]:
        """Loop-erased vertex sequence; for display only."""
        out: list[int] = []
        where: dict[int, int] = {}
        for x in self.vertices:
            if x in where:
                cut = where[x]
                for y in out[cut + 1:]:
                    del where[y]
                del out[cut + 1:]
            else:
                where[x] = len(out)
                out.append(x)
        return out


def join_walks(g: WeightedGraph, pieces: Iterable[Sequence[int]]) -> PathRecord:
    """Concatenate vertex sequences that share their junction vertices."""
    verts: list[int] = []
    for piece in pieces:
        if not piece:
            continue
        if verts and verts[-1] == piece[0]:
            verts.extend(piece[1:])
        else:
            verts.extend(piece)
    return PathRecord.along(g, verts)


@dataclass(frozen=True)
class Unreachable:
    """Returned instead of a path when the endpoints lie in different components."""

    source: int
    target: int

    def __bool__(self) -> bool:
        return False


@dataclass
class SearchForest:
    """Result of a (multi-source) Dijkstra search.

    ``dist[x]`` is the distance to the nearest source (``INF`` if unreached),
    ``root[x]`` that source (ties: smaller id), ``parent[x]`` the next vertex
    towards it and ``height[x]`` the hop depth in the forest.
    """

    dist: list[float]
    root: list[int]
    parent: list[int]
    height: list[int]
    order: list[int]

    def reached(self, x: int) -> bool:
        return self.root[x] >= 0

    def route(self, x: int) -> list[int]:
        """Vertices from ``x`` up to its root."""
        out = [x]
        while self.parent[x] >= 0:
            x = self.parent[x]
            out.append(x)
        return out


def search_forest(
    g: WeightedGraph,
    sources: Iterable[int],
    limit: Sequence[float] | None = None,
) -> SearchForest:
    """Multi-source Dijkstra with the package-wide tie-break.

    Each vertex is labelled by the lexicographically smallest
    (distance, source id).  ``limit`` prunes the search: a vertex is only
    reached when its tentative distance is strictly below ``limit[x]`` (used to
    grow Thorup-Zwick clusters).
    """
    n = g.n
    dist = [INF] * n
    root = [-1] * n
    heap: list[tuple[float, int, int]] = []
    for s in sorted(set(sources)):
        if limit is not None and not 0 < limit[s]:
            continue
        dist[s], root[s] = 0, s
        heap.append((0, s, s))
    heapq.heapify(heap)
    done = [False] * n
    order = []
    adjacency = g.adjacency
    while heap:
        d, s, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        order.append(x)
        for y, w, _ in adjacency[x]:
            if done[y]:
                continue
            nd = d + w
            if limit is not None and not nd < limit[y]:
                continue
            if nd < dist[y] or (nd == dist[y] and s < root[y]):
                dist[y], root[y] = nd, s
                heapq.heappush(heap, (nd, s, y))
    parent = [-1] * n
    height = [0] * n
    for x in order:
        if dist[x] == 0:
            continue
        for y, w, _ in adjacency[x]:
            if done[y] and root[y] == root[x] and dist[y] + w == dist[x]:
                parent[x] = y
                height[x] = height[y] + 1
                break
    for x in range(n):
        if not done[x]:
            dist[x], root[x] = INF, -1
    return SearchForest(dist, root, parent, height, order)


class ExactOracle:
    """Exact distances and consistent shortest paths, one cached tree per target."""

    def __init__(self, g: WeightedGraph):
        self.g = g
        self._trees: dict[int, SearchForest] = {}

    def tree(self, root: int) -> SearchForest:
        t = self._trees.get(root)
        if t is None:
            t = self._trees[root] = search_forest(self.g, [root])
        return t

    def distance(self, u: int, v: int) -> float | None:
        if u in self._trees:
            d = self._trees[u].dist[v]
        else:
            d = self.tree(v).dist[u]
        return None if d == INF else d

    def path(self, u: int, v: int) -> PathRecord | Unreachable:
        t = self.tree(v)
        if not t.reached(u):
            return Unreachable(u, v)
        return PathRecord(tuple(t.route(u)), t.dist[u])

    def all_distances(self, sources: Iterable[int] | None = None) -> dict[int, list[float]]:
        rows = range(self.g.n) if sources is None else sources
        return {s: self.tree(s).dist for s in rows}


def shortest_path(g: WeightedGraph, u: int, v: int) -> PathRecord | Unreachable:
    """Exact shortest u-v path.

    Among equally short routes the lexicographically smallest vertex sequence
    is returned: it is read off the target's shortest-path tree in which every
    vertex points at its smallest-id neighbour on a shortest route.
    """
    return ExactOracle(g).path(u, v)


def _lexicographic_search(
    n: int,
    adjacency: Sequence[Sequence[tuple[int, float, bool]]],
    source: int,
) -> tuple[list, list, list]:
    """Dijkstra on (weight, hops) keys; returns keys, predecessors and hop kinds."""
    key: list = [None] * n
    pred = [-1] * n
    kind = [False] * n
    key[source] = (0, 0)
    heap = [(0, 0, -1, False, source)]
    done = [False] * n
    while heap:
        d, h, p, extra, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        key[x], pred[x], kind[x] = (d, h), p, extra
        for y, w, is_extra in adjacency[x]:
            if done[y]:
                continue
            cand = (d + w, h + 1)
            if key[y] is None or cand < key[y] or (cand == key[y] and (x, is_extra) < (pred[y], kind[y])):
                key[y], pred[y], kind[y] = cand, x, is_extra
                heapq.heappush(heap, (d + w, h + 1, x, is_extra, y))
    return key, pred, kind


def union_adjacency(
    g: WeightedGraph, extra: Iterable[tuple[int, int, float]]
) -> list[list[tuple[int, float, bool]]]:
    adjacency: list[list[tuple[int, float, bool]]] = [
        [(y, w, False) for y, w, _ in row] for row in g.adjacency
    ]
    for x, y, w in extra:
        adjacency[x].append((y, w, True))
        adjacency[y].append((x, w, True))
    for row in adjacency:
        row.sort()
    return adjacency


def _bellman_ford_path(n, adjacency, u, v, beta) -> PathRecord | None:
    # history[x]: (round, dist, pred, via_extra), appended on every improvement
    history: list[list[tuple[int, float, int, bool]]] = [[] for _ in range(n)]
    dist = [INF] * n
    dist[u] = 0
    history[u].append((0, 0, -1, False))
    frontier = {u}
    for rnd in range(1, beta + 1):
        best: dict[int, tuple[float, int, bool]] = {}
        for x in sorted(frontier):
            dx = dist[x]
            for y, w, is_extra in adjacency[x]:
                cand = (dx + w, x, is_extra)
                if cand[0] < dist[y] and (y not in best or cand < best[y]):
                    best[y] = cand
        if not best:
            break
        for y, (d, x, is_extra) in best.items():
            dist[y] = d
            history[y].append((rnd, d, x, is_extra))
        frontier = set(best)
    if dist[v] == INF:
        return None
    verts = [v]
    kinds = []
    x, rnd = v, beta
    while True:
        entry = next(e for e in reversed(history[x]) if e[0] <= rnd)
        if entry[2] < 0:
            break
        kinds.append(entry[3])
        x, rnd = entry[2], entry[0] - 1
        verts.append(x)
    verts.reverse()
    kinds.reverse()
    return PathRecord(tuple(verts), dist[v], tuple(kinds))


def bounded_hop_path(
    g: WeightedGraph,
    extra: Iterable[tuple[int, int, float]],
    u: int,
    v: int,
    beta: int,
) -> PathRecord | None:
    """Lightest u-v path using at most ``beta`` edges of G plus ``extra``.

    A (weight, hops) Dijkstra answers directly whenever the lightest path
    overall already fits in the budget; otherwise ``beta`` rounds of
    Bellman-Ford relaxation decide.  ``via_extra`` marks hops taken on extra edges.
    """
    if beta < 1:
        raise ValueError("hop budget must be at least 1")
    adjacency = union_adjacency(g, extra)
    return _bounded_from(g.n, adjacency, u, beta, {})(v)


def _bounded_from(n, adjacency, u, beta, cache):
    if u not in cache:
        cache[u] = _lexicographic_search(n, adjacency, u)
    key, pred, kind = cache[u]

    def answer(v: int) -> PathRecord | None:
        if u == v:
            return PathRecord((u,), 0, ())
        if key[v] is None:
            return None
        if key[v][1] > beta:
            return _bellman_ford_path(n, adjacency, u, v, beta)
        verts, kinds = [v], []
        x = v
        while x != u:
            kinds.append(kind[x])
            x = pred[x]
            verts.append(x)
        verts.reverse()
        kinds.reverse()
        return PathRecord(tuple(verts), key[v][0], tuple(kinds))

    return answer


class BoundedHopSearch:
    """Reusable hop-bounded search over G plus a fixed extra edge set."""

    def __init__(self, g: WeightedGraph, extra: Iterable[tuple[int, int, float]], beta: int):
        if beta < 1:
            raise ValueError("hop budget must be at least 1")
        self.n = g.n
        self.beta = beta
        self.adjacency = union_adjacency(g, extra)
        self._cache: dict[int, tuple] = {}

    def path(self, u: int, v: int) -> PathRecord | None:
        return _bounded_from(self.n, self.adjacency, u, self.beta, self._cache)(v)


def girth(g: WeightedGraph) -> float:
    """Length of the shortest cycle, ignoring weights; ``INF`` for forests."""
    best = INF
    for s in range(g.n):
        depth = [-1] * g.n
        parent = [-1] * g.n
        depth[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if 2 * depth[x] + 1 >= best:
                break
            for y, _, _ in g.adjacency[x]:
                if depth[y] < 0:
                    depth[y] = depth[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif y != parent[x]:
                    best = min(best, depth[x] + depth[y] + 1)
    return best
