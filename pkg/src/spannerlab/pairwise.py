"""Path-reporting pairwise spanners.

Three constructions share one query contract (``query(u, v)`` returns a walk
in the spanner between the endpoints of a registered pair):

* ``exact_preserver``: stores one consistent shortest path per pair;
* ``compose_hopset``: stores a hop-bounded path over G ∪ H per pair and
  expands every hopset edge through a base pairwise oracle built over all of H;
* ``pairwise_v2``: like the composition, but H1/H2 edges are expanded by the
  hopset's own link families, so the base oracle only has to cover H3.
"""
from __future__ import annotations

from typing import Callable, Iterable

from .graph import BoundedHopSearch, ExactOracle, PathRecord, Unreachable, WeightedGraph, join_walks
from .hopset import HopsetParts, build_hopset


class PairNotRegistered(KeyError):
    """Raised when a pairwise oracle is asked about a pair it was not built for."""

    def __init__(self, u: int, v: int):
        super().__init__(f"pair ({u}, {v}) is not registered with this oracle")
        self.u, self.v = u, v

    def as_dict(self) -> dict:
        return {"error": "pair not registered", "pair": [self.u, self.v]}


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class ExactPreserver:
    """Union of consistent shortest paths; stretch 1."""

    kind = "exact"
    declared_stretch = 1

    def __init__(self, g: WeightedGraph, pairs: Iterable[tuple[int, int]], exact: ExactOracle | None = None):
        self.g = g
        exact = exact or ExactOracle(g)
        self.paths: dict[tuple[int, int], tuple[int, ...]] = {}
        for u, v in pairs:
            if u == v or _key(u, v) in self.paths:
                continue
            p = exact.path(u, v)
            if isinstance(p, Unreachable):
                raise ValueError(f"pair ({u}, {v}) is disconnected")
            verts = p.vertices if u < v else p.vertices[::-1]
            self.paths[_key(u, v)] = verts
        self._edges = {e for verts in self.paths.values() for e in zip(verts, verts[1:])}

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return _key(*pair) in self.paths

    def pairs(self) -> list[tuple[int, int]]:
        return list(self.paths)

    def route(self, u: int, v: int) -> list[int]:
        verts = self.paths.get(_key(u, v))
        if verts is None:
            raise PairNotRegistered(u, v)
        return list(verts) if u < v else list(verts[::-1])

    def query(self, u: int, v: int) -> PathRecord:
        if u == v:
            return PathRecord((u,), 0)
        return PathRecord.along(self.g, self.route(u, v))

    def spanner_edges(self) -> set[tuple[int, int]]:
        return {_key(a, b) for a, b in self._edges}

    def ledger(self) -> dict[str, int]:
        return {"edges": 0, "path_entries": sum(len(p) for p in self.paths.values()),
                "link_entries": 0, "tables": 0}


def exact_preserver(g: WeightedGraph, pairs: Iterable[tuple[int, int]], exact: ExactOracle | None = None) -> ExactPreserver:
    return ExactPreserver(g, pairs, exact)


BaseBuilder = Callable[[WeightedGraph, list[tuple[int, int]]], ExactPreserver]


class HopsetPairwise:
    """Per-pair hop-bounded paths over G ∪ H, expanded at query time.

    ``mode`` is "compose" (every hop edge goes to ``base``) or "v2" (H1/H2
    hop edges go to the hopset link families, H3 to ``base``).  ``base`` is
    either a built pairwise oracle or a builder; a builder is called once the
    hop paths are known, with just the hop edges they need from it.
    """

    def __init__(
        self,
        g: WeightedGraph,
        pairs: Iterable[tuple[int, int]],
        parts: HopsetParts,
        base,
        mode: str,
    ):
        if mode not in ("compose", "v2"):
            raise ValueError(f"unknown mode {mode!r}")
        self.kind = mode
        self.g = g
        self.parts = parts
        self.mode = mode
        self.beta = parts.schedule.hop_budget
        search = BoundedHopSearch(g, parts.edges(), self.beta)
        self.paths: dict[tuple[int, int], tuple[tuple[int, ...], tuple[bool, ...]]] = {}
        for u, v in pairs:
            if u == v or _key(u, v) in self.paths:
                continue
            a, b = _key(u, v)
            p = search.path(a, b)
            if p is None:
                raise ValueError(f"pair ({u}, {v}) has no path within {self.beta} hops")
            self.paths[(a, b)] = (p.vertices, p.via_extra)
        hop_edges = sorted({
            _key(x, y)
            for verts, flags in self.paths.values()
            for x, y, extra in zip(verts, verts[1:], flags) if extra
        })
        on_links = [e for e in hop_edges if mode == "v2" and parts.part_of(*e) in ("h1", "h2")]
        self.base = base if hasattr(base, "route") else base(g, sorted(set(hop_edges) - set(on_links)))
        for x, y in hop_edges:
            if not self._covered(x, y):
                raise ValueError(f"hop edge ({x}, {y}) is not covered by the base oracle")
        # link entries (family, vertex) that the expansions walk through
        self.links: set[tuple] = set()
        self._link_edges: set[tuple[int, int]] = set()
        for x, y in on_links:
            family, route = self._family_route(x, y)
            self.links.update((family, z) for z in route[:-1])
            self._link_edges.update(_key(s, t) for s, t in zip(route, route[1:]))

    @property
    def declared_stretch(self) -> int:
        return self.base.declared_stretch * self.parts.schedule.stretch_bound

    def _covered(self, x: int, y: int) -> bool:
        if self.mode == "v2" and self.parts.part_of(x, y) in ("h1", "h2"):
            return True
        return (x, y) in self.base

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return _key(*pair) in self.paths

    def pairs(self) -> list[tuple[int, int]]:
        return list(self.paths)

    def hop_path(self, u: int, v: int) -> tuple[tuple[int, ...], tuple[bool, ...]]:
        """Stored hop path oriented from u to v, with hopset-edge flags."""
        entry = self.paths.get(_key(u, v))
        if entry is None:
            raise PairNotRegistered(u, v)
        verts, flags = entry
        if u > v:
            verts, flags = verts[::-1], flags[::-1]
        return verts, flags

    def _family_route(self, x: int, y: int) -> tuple[tuple, list[int]]:
        """Link family and its route (from the non-root end to the root) for an H1/H2 edge."""
        key = _key(x, y)
        if key in self.parts.h1:
            a, i = self.parts.h1[key]
            return ("h1", i), self.parts.h1_route(i, a)
        a, b, j = self.parts.h2[key]
        return ("h2", b), self.parts.h2_route(j, b, a)

    def expand(self, x: int, y: int) -> list[int]:
        """Graph route for the hopset edge (x, y)."""
        if self.mode == "v2" and self.parts.part_of(x, y) in ("h1", "h2"):
            _, route = self._family_route(x, y)
            return route if route[0] == x else route[::-1]
        return self.base.route(x, y)

    def query(self, u: int, v: int) -> PathRecord:
        if u == v:
            return PathRecord((u,), 0)
        verts, flags = self.hop_path(u, v)
        pieces = []
        for x, y, extra in zip(verts, verts[1:], flags):
            pieces.append(self.expand(x, y) if extra else [x, y])
        return join_walks(self.g, pieces)

    def spanner_edges(self) -> set[tuple[int, int]]:
        out = set(self.base.spanner_edges())
        for verts, flags in self.paths.values():
            for x, y, extra in zip(verts, verts[1:], flags):
                if not extra:
                    out.add(_key(x, y))
        return out | self._link_edges

    def sizes(self) -> dict[str, int]:
        path_words = sum(len(v) for v, _ in self.paths.values())
        if self.mode == "compose":
            return {"pair_paths": path_words, "h_preserver_edges": len(self.base.spanner_edges())}
        return {
            "pair_paths": path_words,
            "preserver_links": len(self.links),
            "h3_preserver_edges": len(self.base.spanner_edges()),
        }

    def ledger(self) -> dict[str, int]:
        base = self.base.ledger()
        return {
            "edges": base["edges"],
            "path_entries": base["path_entries"] + sum(len(v) for v, _ in self.paths.values()),
            "link_entries": base["link_entries"] + len(self.links),
            "tables": base["tables"],
        }


def compose_hopset(
    g: WeightedGraph,
    pairs: Iterable[tuple[int, int]],
    parts: HopsetParts,
    base: BaseBuilder = exact_preserver,
) -> HopsetPairwise:
    """Pairwise oracle with stretch t·(8c+3), t the base oracle's stretch."""
    hop_pairs = [(a, b) for a, b, _ in parts.edges()]
    return HopsetPairwise(g, pairs, parts, base(g, hop_pairs), "compose")


def pairwise_v2(
    g: WeightedGraph,
    pairs: Iterable[tuple[int, int]],
    c: int,
    k: int,
    delta: float | None = None,
    seed: int | None = 0,
    base: BaseBuilder = exact_preserver,
    parts: HopsetParts | None = None,
) -> HopsetPairwise:
    """Pairwise oracle whose base structure only covers the H3 hop edges in use."""
    parts = parts or build_hopset(g, c, k, delta, seed)
    return HopsetPairwise(g, pairs, parts, base, "v2")
