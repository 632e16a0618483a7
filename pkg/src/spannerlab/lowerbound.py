"""Lower-bound instances: layered base graphs, their recursive blow-ups, and
δ-pairs in high-girth graphs.

Everything here runs in exact integer arithmetic; "unique shortest path"
always means the second-best route is strictly heavier.
"""
from __future__ import annotations

import itertools
import math
import random
import statistics
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .graph import WeightedGraph, girth, search_forest


@dataclass
class LayeredBaseGraph:
    """Layers L_0..L_{2l} of p vertices each; ``forward[i][x][a]`` is the
    L_{i+1} endpoint of the label-a edge leaving vertex x of L_i."""

    p: int
    l: int
    forward: list[list[list[int]]]

    @property
    def labels(self) -> int:
        return len(self.forward[0][0]) if self.forward and self.forward[0] else 0

    @property
    def layers(self) -> int:
        return 2 * self.l + 1

    def vertex(self, i: int, x: int) -> int:
        return i * self.p + x

    def out(self, u: int, a: int, b: int) -> int:
        """Endpoint in L_{2l} of the walk from u ∈ L_0 alternating labels a, b."""
        return self.walk(u, a, b)[-1]

    def walk(self, u: int, a: int, b: int) -> list[int]:
        out = [u]
        for i in range(2 * self.l):
            out.append(self.forward[i][out[-1]][a if i % 2 == 0 else b])
        return out

    def pairs(self) -> list[tuple[int, int, int, int]]:
        """(u, v, a, b) for every u ∈ L_0 and label pair, v = out(u, a, b)."""
        q = self.labels
        return [(u, self.out(u, a, b), a, b) for u in range(self.p) for a in range(q) for b in range(q)]

    def graph(self) -> WeightedGraph:
        edges = []
        for i, layer in enumerate(self.forward):
            for x, targets in enumerate(layer):
                for y in targets:
                    edges.append((self.vertex(i, x), self.vertex(i + 1, y), 1))
        return WeightedGraph(self.layers * self.p, edges)

    def with_swapped_labels(self, i: int, x: int, a: int = 0, b: int = 1) -> "LayeredBaseGraph":
        forward = [[list(t) for t in layer] for layer in self.forward]
        forward[i][x][a], forward[i][x][b] = forward[i][x][b], forward[i][x][a]
        return LayeredBaseGraph(self.p, self.l, forward)


def load_base_graph(text: str) -> LayeredBaseGraph:
    """Header "p l", then one "i u a v" line per labeled edge ('#' comments)."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append((lineno, [int(t) for t in line.split()]))
        except ValueError:
            raise ValueError(f"line {lineno}: expected integers, got {raw!r}") from None
    if not rows or len(rows[0][1]) != 2:
        raise ValueError("missing 'p l' header")
    p, l = rows[0][1]
    if p < 1 or l < 1:
        raise ValueError(f"need p >= 1 and l >= 1, got p={p} l={l}")
    found: dict[tuple[int, int, int], int] = {}
    for lineno, nums in rows[1:]:
        if len(nums) != 4:
            raise ValueError(f"line {lineno}: expected 'i u a v'")
        i, u, a, v = nums
        if not (0 <= i < 2 * l and 0 <= u < p and 0 <= v < p and a >= 0):
            raise ValueError(f"line {lineno}: edge out of range")
        if (i, u, a) in found:
            raise ValueError(f"line {lineno}: label {a} repeated at layer {i} vertex {u}")
        found[(i, u, a)] = v
    q = 1 + max((a for _, _, a in found), default=-1)
    forward = [[[-1] * q for _ in range(p)] for _ in range(2 * l)]
    for (i, u, a), v in found.items():
        forward[i][u][a] = v
    missing = [(i, u, a) for i in range(2 * l) for u in range(p) for a in range(q) if forward[i][u][a] < 0]
    if missing:
        i, u, a = missing[0]
        raise ValueError(f"layer {i} vertex {u} has no edge with label {a}")
    return LayeredBaseGraph(p, l, forward)


def dump_base_graph(b: LayeredBaseGraph) -> str:
    lines = [f"{b.p} {b.l}"]
    for i, layer in enumerate(b.forward):
        lines.append(f"# layer {i} -> {i + 1}")
        for u, targets in enumerate(layer):
            lines.extend(f"{i} {u} {a} {v}" for a, v in enumerate(targets))
    return "\n".join(lines) + "\n"


def _walk_count(b: LayeredBaseGraph, u: int) -> dict[int, int]:
    """Number of forward walks from u ∈ L_0 to each vertex of L_{2l}."""
    counts = {u: 1}
    for layer in b.forward:
        nxt: dict[int, int] = {}
        for x, c in counts.items():
            for y in layer[x]:
                nxt[y] = nxt.get(y, 0) + c
        counts = nxt
    return counts


def validate_base_graph(b: LayeredBaseGraph) -> dict:
    """Check layering, label determinism and unique/disjoint labeled walks."""
    if b.l < 1:
        raise ValueError("a base graph needs at least 3 layers (l >= 1)")
    report: dict = {"p": b.p, "l": b.l, "labels": b.labels}
    bad_layer = next(((i, x) for i, layer in enumerate(b.forward) for x, t in enumerate(layer)
                      if any(not 0 <= y < b.p for y in t)), None)
    report["layering"] = {"ok": bad_layer is None, "witness": bad_layer}
    bad_label = next(((i, x) for i, layer in enumerate(b.forward) for x, t in enumerate(layer)
                      if len(t) != b.labels or len(set(t)) != len(t)), None)
    report["label_determinism"] = {"ok": bad_label is None, "witness": bad_label}
    witness = None
    if bad_layer is None:
        for u in range(b.p):
            counts = _walk_count(b, u)
            for a, c in itertools.product(range(b.labels), repeat=2):
                v = b.out(u, a, c)
                if counts[v] != 1:
                    witness = {"pair": [u, v], "labels": [a, c], "shortest_paths": counts[v]}
                    break
            if witness:
                break
        if witness is None:
            for a, c in itertools.product(range(b.labels), repeat=2):
                owner: dict[tuple[int, int], int] = {}
                for u in range(b.p):
                    for i, x in enumerate(b.walk(u, a, c)):
                        if (i, x) in owner:
                            witness = {"labels": [a, c], "inputs": [owner[(i, x)], u], "shared": [i, x]}
                            break
                        owner[(i, x)] = u
                    if witness:
                        break
                if witness:
                    break
    report["unique_disjoint_walks"] = {"ok": bad_layer is None and witness is None, "witness": witness}
    report["pairs"] = b.p * b.labels ** 2
    report["ok"] = all(report[k]["ok"] for k in ("layering", "label_determinism", "unique_disjoint_walks"))
    return report


def search_base_graph(p: int, l: int, q: int, limit: int | None = None) -> LayeredBaseGraph | None:
    """First valid base graph whose label maps are permutations, in lexicographic order.

    Every layer uses q permutations of range(p), one per label; walks with a
    fixed label pair are then vertex-disjoint automatically, so only walk
    uniqueness has to be searched for.
    """
    perms = list(itertools.permutations(range(p)))
    layer_choices = [
        combo for combo in itertools.product(perms, repeat=q)
        if all(len({perm[x] for perm in combo}) == q for x in range(p))
    ]
    tried = 0
    for choice in itertools.product(layer_choices, repeat=2 * l):
        tried += 1
        if limit is not None and tried > limit:
            return None
        forward = [[[combo[a][x] for a in range(q)] for x in range(p)] for combo in choice]
        b = LayeredBaseGraph(p, l, forward)
        if _unique_walks(b):
            return b
    return None


def _unique_walks(b: LayeredBaseGraph) -> bool:
    for u in range(b.p):
        counts = _walk_count(b, u)
        for a, c in itertools.product(range(b.labels), repeat=2):
            if counts[b.out(u, a, c)] != 1:
                return False
    return True


@dataclass
class RecursiveInstance:
    """H_κ[p, l] with its certified pair set and critical (bottom-level) edges."""

    kappa: int
    p: int
    l: int
    graph: WeightedGraph
    inputs: list[int]
    outputs: list[int]
    pairs: list[tuple[int, int]]
    critical: frozenset[tuple[int, int]]

    @property
    def expected_distance(self) -> int:
        return (2 * self.l * self.kappa + 1) * (2 * self.l - 1) ** self.kappa

    def vertex_bound_holds(self) -> bool:
        """n <= 2 (2l)^κ p^(2 - 1/2^κ), compared after raising both sides to 2^κ."""
        e = 2 ** self.kappa
        return self.graph.n ** e <= (2 * (2 * self.l) ** self.kappa) ** e * self.p ** (2 * e - 1)

    def sidecar(self) -> dict:
        return {
            "kappa": self.kappa,
            "p": self.p,
            "l": self.l,
            "pairs": [list(x) for x in self.pairs],
            "critical_edges": sorted(list(e) for e in self.critical),
            "expected_distance": self.expected_distance,
        }


def complete_bipartite(p: int) -> RecursiveInstance:
    edges = [(i, p + j, 1) for i in range(p) for j in range(p)]
    g = WeightedGraph(2 * p, edges)
    return RecursiveInstance(
        0, p, 1, g, list(range(p)), list(range(p, 2 * p)),
        [(i, p + j) for i in range(p) for j in range(p)],
        frozenset((a, b) for a, b, _ in edges),
    )


def build_recursive(bases: LayeredBaseGraph | Sequence[LayeredBaseGraph], kappa: int) -> RecursiveInstance:
    """H_κ from base graphs B_κ, B_{κ-1}, ..., B_1 (outermost first).

    Inner copies replace the internal vertices of the outer base graph.  A
    label-a edge from layer i enters or leaves copies at port a: even i joins
    input ports, odd i joins output ports, so successive copies are crossed in
    alternating directions.  A single base graph is reused at every level.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if isinstance(bases, LayeredBaseGraph):
        bases = [bases] * max(kappa, 1)
    bases = list(bases)
    if kappa == 0:
        return complete_bipartite(bases[0].p)
    if len(bases) < kappa:
        raise ValueError(f"kappa={kappa} needs {kappa} base graphs, got {len(bases)}")
    outer = bases[0]
    if any(b.l != outer.l for b in bases[:kappa]):
        raise ValueError("all base graphs must share the same l")
    q = outer.labels
    inner = build_recursive(bases[1:kappa], kappa - 1) if kappa > 1 else complete_bipartite(q)
    if inner.p != q:
        raise ValueError(f"inner instance has {inner.p} ports but the outer base graph uses {q} labels")

    p, l = outer.p, outer.l
    weight = (2 * l - 1) ** kappa
    size = inner.graph.n
    offsets: dict[tuple[int, int], int] = {}
    nxt = p
    for i in range(1, 2 * l):
        for x in range(p):
            offsets[(i, x)] = nxt
            nxt += size
    outputs = list(range(nxt, nxt + p))
    n = nxt + p

    edges = []
    critical = set()
    for (i, x), off in offsets.items():
        for a, b, w in inner.graph.edges:
            edges.append((a + off, b + off, w))
        critical.update((a + off, b + off) for a, b in inner.critical)

    def port(i: int, x: int, a: int, side: str) -> int:
        if i == 0:
            return x
        if i == 2 * l:
            return outputs[x]
        ports = inner.inputs if side == "in" else inner.outputs
        return offsets[(i, x)] + ports[a]

    for i, layer in enumerate(outer.forward):
        side = "in" if i % 2 == 0 else "out"
        for x, targets in enumerate(layer):
            for a, y in enumerate(targets):
                edges.append((port(i, x, a, side), port(i + 1, y, a, side), weight))

    inner_pairs = set(inner.pairs)
    pairs = []
    for u, v, a, b in outer.pairs():
        if (inner.inputs[a], inner.outputs[b]) in inner_pairs:
            pairs.append((u, outputs[v]))
    return RecursiveInstance(kappa, p, l, WeightedGraph(n, edges), list(range(p)), outputs,
                             pairs, frozenset(critical))


def _distance(g: WeightedGraph, u: int, v: int):
    f = search_forest(g, [u])
    return f.dist[v], f.route(v)[::-1] if f.reached(v) else None


def verify_recursive(inst: RecursiveInstance, deletions: bool = True) -> dict:
    """Distance formula, uniqueness, critical-edge disjointness and deletion gaps."""
    g = inst.graph
    expected = inst.expected_distance
    gap = 2 * (2 * inst.l - 1) ** inst.kappa
    failures = []
    owner: dict[tuple[int, int], tuple[int, int]] = {}
    per_pair_critical = []
    min_gap = None
    min_second = None
    for u, v in inst.pairs:
        d, path = _distance(g, u, v)
        if d != expected:
            failures.append({"check": "distance", "pair": [u, v], "distance": d, "expected": expected})
            continue
        edges = [(min(a, b), max(a, b)) for a, b in zip(path, path[1:])]
        crit = [e for e in edges if e in inst.critical]
        per_pair_critical.append(len(crit))
        for e in crit:
            if e in owner:
                failures.append({"check": "critical_disjoint", "pair": [u, v], "edge": list(e),
                                 "shared_with": list(owner[e])})
            owner[e] = (u, v)
        second = None
        for e in edges:
            alt, _ = _distance(g.without_edges([e]), u, v)
            second = alt if second is None else min(second, alt)
            if deletions and e in inst.critical:
                rise = alt - d
                min_gap = rise if min_gap is None else min(min_gap, rise)
                if rise < gap:
                    failures.append({"check": "deletion_gap", "pair": [u, v], "edge": list(e), "rise": rise})
        if second is not None and second <= d:
            failures.append({"check": "unique", "pair": [u, v], "second_best": second})
        if second is not None:
            min_second = second if min_second is None else min(min_second, second)
    return {
        "kappa": inst.kappa,
        "p": inst.p,
        "l": inst.l,
        "vertices": g.n,
        "edges": g.m,
        "vertex_bound_ok": inst.vertex_bound_holds(),
        "pairs": len(inst.pairs),
        "expected_distance": expected,
        "critical_edges": len(inst.critical),
        "min_critical_per_pair": min(per_pair_critical, default=0),
        "second_best_min": min_second,
        "required_gap": gap,
        "min_deletion_gap": min_gap,
        "pair_ratio": (inst.p ** 2) / len(inst.pairs) if inst.pairs else None,
        "failures": failures,
        "ok": not failures and inst.vertex_bound_holds(),
    }


@dataclass
class GirthInstance:
    graph: WeightedGraph
    p: int
    k: int
    alpha: int
    delta: int
    pairs: list[tuple[int, int]]
    paths: dict[tuple[int, int], tuple[int, ...]]
    coverage: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def expected_pairs(self) -> int:
        return self.graph.n * (self.p + 1) * self.p ** (self.delta - 1) // 2

    @property
    def expected_coverage(self) -> int:
        return self.delta * self.p ** (self.delta - 1)


def _bfs_counts(g: WeightedGraph, s: int, cap: int):
    dist = {s: 0}
    count = {s: 1}
    parent = {s: -1}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if dist[x] == cap:
            continue
        for y in g.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                count[y] = count[x]
                parent[y] = x
                queue.append(y)
            elif dist[y] == dist[x] + 1:
                count[y] += count[x]
    return dist, count, parent


def delta_pairs(g: WeightedGraph, k: int, alpha: int) -> GirthInstance:
    """Pairs at hop distance δ = ⌊k/(α+1)⌋ in a regular graph of girth > k."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    delta = k // (alpha + 1)
    if delta < 1:
        raise ValueError(f"delta = floor({k}/({alpha}+1)) = 0; need k >= alpha + 1")
    degrees = {g.degree(x) for x in range(g.n)}
    if len(degrees) != 1:
        raise ValueError("graph is not regular")
    p = degrees.pop() - 1
    gg = girth(g)
    if gg <= k:
        raise ValueError(f"girth {gg} must exceed k={k}")
    pairs = []
    paths = {}
    coverage: dict[tuple[int, int], int] = {e: 0 for e in ((u, v) for u, v, _ in g.edges)}
    for u in range(g.n):
        dist, count, parent = _bfs_counts(g, u, delta)
        for v in sorted(x for x, d in dist.items() if d == delta and x > u):
            if count[v] != 1:
                raise ValueError(f"pair ({u}, {v}) has {count[v]} shortest paths")
            route = [v]
            while route[-1] != u:
                route.append(parent[route[-1]])
            route.reverse()
            pairs.append((u, v))
            paths[(u, v)] = tuple(route)
            for a, b in zip(route, route[1:]):
                coverage[(min(a, b), max(a, b))] += 1
    return GirthInstance(g, p, k, alpha, delta, pairs, paths, coverage)


def girth_report(inst: GirthInstance, check_alternatives: bool = True) -> dict:
    cov = sorted(set(inst.coverage.values()))
    second_ok = True
    witness = None
    if check_alternatives:
        # any other u-v route has length >= girth - delta > alpha * delta
        for (u, v), route in inst.paths.items():
            for a, b in zip(route, route[1:]):
                f = search_forest(inst.graph.without_edges([(a, b)]), [u])
                if f.dist[v] <= inst.alpha * inst.delta:
                    second_ok = False
                    witness = {"pair": [u, v], "edge": [a, b], "alternative": f.dist[v]}
                    break
            if not second_ok:
                break
    report = {
        "n": inst.graph.n,
        "p": inst.p,
        "k": inst.k,
        "alpha": inst.alpha,
        "delta": inst.delta,
        "girth": girth(inst.graph),
        "edges": inst.graph.m,
        "expected_edges": inst.graph.n * (inst.p + 1) // 2,
        "pairs": len(inst.pairs),
        "expected_pairs": inst.expected_pairs,
        "per_edge_coverage": cov[0] if len(cov) == 1 else {"min": cov[0], "max": cov[-1]},
        "expected_coverage": inst.expected_coverage,
        "unique_paths": True,
        "alternatives_exceed_alpha_delta": second_ok,
        "witness": witness,
    }
    report["ok"] = (
        second_ok
        and report["pairs"] == report["expected_pairs"]
        and report["edges"] == report["expected_edges"]
        and cov == [inst.expected_coverage]
    )
    return report


def coverage_experiment(inst: GirthInstance, seed: int | None, trials: int, prob: float | None = None) -> dict:
    """Sample each δ-pair independently and measure how many edges the sample forces."""
    if prob is None:
        prob = 1 / inst.expected_coverage
    if not 0 <= prob <= 1:
        raise ValueError("sampling probability must lie in [0, 1]")
    rng = random.Random(seed)
    m = inst.graph.m
    threshold = 1 - 2 / math.e
    lo, hi = m / (2 * inst.delta), 3 * m / (2 * inst.delta)
    rows = []
    for t in range(trials):
        chosen = [pr for pr in inst.pairs if rng.random() < prob]
        covered = set()
        for pr in chosen:
            route = inst.paths[pr]
            covered.update((min(a, b), max(a, b)) for a, b in zip(route, route[1:]))
        frac = len(covered) / m
        rows.append({
            "trial": t,
            "sampled": len(chosen),
            "covered": len(covered),
            "covered_fraction": frac,
            "overhead": len(covered) / len(chosen) if chosen else None,
            "flag": frac >= threshold and lo <= len(chosen) <= hi,
        })
    fracs = [r["covered_fraction"] for r in rows]
    overheads = [r["overhead"] for r in rows if r["overhead"] is not None]
    return {
        "probability": prob,
        "trials": trials,
        "seed": seed,
        "edges": m,
        "pairs": len(inst.pairs),
        "threshold": threshold,
        "expected_fraction": 1 - (1 - prob) ** inst.expected_coverage,
        "mean_fraction": statistics.fmean(fracs) if fracs else 0.0,
        "median_fraction": statistics.median(fracs) if fracs else 0.0,
        "median_overhead": statistics.median(overheads) if overheads else None,
        "above_threshold": sum(f >= threshold for f in fracs) / trials if trials else 0.0,
        "flagged": sum(r["flag"] for r in rows),
        "rows": rows,
    }


def incompressible_union(inst: GirthInstance) -> dict:
    """Deleting any union edge pushes some pair past stretch α (delete and recompute)."""
    union = sorted({(min(a, b), max(a, b)) for r in inst.paths.values() for a, b in zip(r, r[1:])})
    by_edge: dict[tuple[int, int], tuple[int, int]] = {}
    for pr, route in inst.paths.items():
        for a, b in zip(route, route[1:]):
            by_edge.setdefault((min(a, b), max(a, b)), pr)
    survivors = []
    for e in union:
        u, v = by_edge[e]
        f = search_forest(inst.graph.without_edges([e]), [u])
        if f.dist[v] <= inst.alpha * inst.delta:
            survivors.append(list(e))
    return {"union_edges": len(union), "removable": survivors, "ok": not survivors}
