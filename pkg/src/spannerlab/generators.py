"""Graph fixtures and seeded random generators."""
from __future__ import annotations

import random

from .graph import WeightedGraph, girth


def path_graph(n: int, weight: int = 1) -> WeightedGraph:
    return WeightedGraph(n, [(i, i + 1, weight) for i in range(n - 1)])


def cycle_graph(n: int, weight: int = 1) -> WeightedGraph:
    return WeightedGraph(n, [(i, (i + 1) % n, weight) for i in range(n)])


def random_tree(n: int, seed: int, max_weight: int = 1) -> WeightedGraph:
    rng = random.Random(seed)
    edges = [(v, rng.randrange(v), rng.randint(1, max_weight)) for v in range(1, n)]
    return WeightedGraph(n, edges)


def random_connected_graph(
    n: int,
    seed: int,
    extra_edges: int | None = None,
    max_weight: int = 10,
) -> WeightedGraph:
    """A random spanning tree plus ``extra_edges`` random chords (default 2n).

    Weights are integers drawn uniformly from [1, max_weight]; max_weight=1
    gives an unweighted graph.
    """
    rng = random.Random(seed)
    if extra_edges is None:
        extra_edges = 2 * n
    order = list(range(n))
    rng.shuffle(order)
    edges = []
    present = set()
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges.append((u, v, rng.randint(1, max_weight)))
        present.add((min(u, v), max(u, v)))
    budget = min(extra_edges, n * (n - 1) // 2 - len(present))
    while budget > 0:
        u, v = rng.randrange(n), rng.randrange(n)
        key = (min(u, v), max(u, v))
        if u == v or key in present:
            continue
        present.add(key)
        edges.append((u, v, rng.randint(1, max_weight)))
        budget -= 1
    return WeightedGraph(n, edges)


def lcf_graph(n: int, shifts: list[int], repeats: int) -> WeightedGraph:
    """Cubic Hamiltonian graph from LCF notation ``[shifts]^repeats``."""
    edges = {(i, (i + 1) % n) for i in range(n)}
    jumps = shifts * repeats
    for i in range(n):
        j = (i + jumps[i % len(jumps)]) % n
        edges.add((min(i, j), max(i, j)))
    edges = {(min(u, v), max(u, v)) for u, v in edges}
    return WeightedGraph(n, [(u, v, 1) for u, v in sorted(edges)])


def petersen() -> WeightedGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return WeightedGraph(10, [(u, v, 1) for u, v in outer + spokes + inner])


def heawood() -> WeightedGraph:
    return lcf_graph(14, [5, -5], 7)


def mcgee() -> WeightedGraph:
    return lcf_graph(24, [12, 7, -7], 8)


CAGES = {"petersen": petersen, "heawood": heawood, "mcgee": mcgee}


def random_regular_graph(n: int, degree: int, seed: int, min_girth: int = 3, attempts: int = 10_000) -> WeightedGraph:
    """Uniform-ish random regular graph by repeated configuration-model pairing.

    Pairings with loops, repeated edges or girth below ``min_girth`` are
    rejected.  Raises RuntimeError when no attempt succeeds.
    """
    if (n * degree) % 2 or degree >= n:
        raise ValueError("need n*degree even and degree < n")
    rng = random.Random(seed)
    stubs = [v for v in range(n) for _ in range(degree)]
    for _ in range(attempts):
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            key = (min(u, v), max(u, v))
            if u == v or key in edges:
                ok = False
                break
            edges.add(key)
        if not ok:
            continue
        g = WeightedGraph(n, [(u, v, 1) for u, v in sorted(edges)])
        if g.is_connected() and girth(g) >= min_girth:
            return g
    raise RuntimeError(f"no {degree}-regular graph on {n} vertices with girth >= {min_girth} found")
