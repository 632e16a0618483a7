import itertools
import math
import random

import pytest

from spannerlab.cluster_prdo import (
    boruvka_star_round,
    build_unweighted_prdo,
    build_weighted_prdo,
    cluster_graph,
    hierarchy_depth,
    loop_erase,
    tree_route,
    unweighted_clustering,
)
from spannerlab.generators import cycle_graph, path_graph, random_connected_graph, random_tree
from spannerlab.graph import ExactOracle, Unreachable, WeightedGraph
from spannerlab.tz import build_tz

from conftest import walk_weight


def check_clustering(g, c, k):
    assert sorted(set(c.cluster_of)) == list(range(c.count))
    for x in range(g.n):
        assert c.height[x] <= k
        root = c.roots[c.cluster_of[x]]
        assert tree_route(c.parent, c.height, x, root)[-1] == root
        p = c.parent[x]
        if p >= 0:
            assert g.has_edge(x, p) and c.cluster_of[p] == c.cluster_of[x]
            assert c.height[x] == c.height[p] + 1
        else:
            assert x == root and c.height[x] == 0


def test_path_of_six_k2():
    g = path_graph(6)
    c = unweighted_clustering(g, 2)
    check_clustering(g, c, 2)
    assert c.count <= 3 and c.radius() <= 2
    # deepest vertex 5 peels {3, 4, 5}; the rest hangs off vertex 0
    assert c.members() == [[3, 4, 5], [0, 1, 2]]


def test_k1_clusters_have_radius_one():
    g = random_connected_graph(40, 2, max_weight=1)
    c = unweighted_clustering(g, 1)
    check_clustering(g, c, 1)
    assert c.radius() <= 1


def test_large_k_gives_one_cluster():
    g = random_connected_graph(60, 3, max_weight=1)
    c = unweighted_clustering(g, 60)
    assert c.count == 1 and c.roots == [0]


def test_peeled_clusters_are_big_enough():
    for seed in range(5):
        g = random_connected_graph(150, seed, extra_edges=30, max_weight=1)
        for k in (2, 3, 4):
            c = unweighted_clustering(g, k)
            check_clustering(g, c, k)
            sizes = [len(m) for m in c.members()]
            assert all(s >= k + 1 for s in sizes[:-1])
            assert c.count <= (g.n - 1) // (k + 1) + 1
            if g.n >= k * k:
                assert c.count <= g.n / k


def test_cluster_bound_is_tight_below_k_squared():
    # a root with two arms of length 5: 11 vertices, 3 clusters, above n/k = 2.75
    arm = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
    g = WeightedGraph(11, [(a, b, 1) for a, b in arm] + [(a and a + 5, b + 5, 1) for a, b in arm])
    c = unweighted_clustering(g, 4)
    check_clustering(g, c, 4)
    assert c.count == 3 == (11 - 1) // 5 + 1


def test_cluster_graph_witnesses():
    g = random_connected_graph(80, 6)
    c = unweighted_clustering(g, 2)
    cg = cluster_graph(g, c.cluster_of, c.count)
    crossing = {}
    for u, v, w in g.edges:
        s, t = c.cluster_of[u], c.cluster_of[v]
        if s != t:
            key = (min(s, t), max(s, t))
            crossing[key] = min(crossing.get(key, (math.inf,)), (w, min(u, v), max(u, v)))
    assert set(cg.witness) == set(crossing)
    for (s, t), (x, y, w) in cg.witness.items():
        assert c.cluster_of[x] == s and c.cluster_of[y] == t
        assert (w, min(x, y), max(x, y)) == crossing[(s, t)]
        assert cg.crossing(t, s) == (y, x)


def test_loop_erase():
    assert loop_erase([1, 2, 3, 2, 4]) == [1, 2, 4]
    assert loop_erase([1, 2, 1, 3]) == [1, 3]
    assert loop_erase([5]) == [5]


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("seed", [0, 1])
def test_unweighted_prdo_exhaustive(k, seed, fw_cache):
    g = random_connected_graph(200, seed, extra_edges=60, max_weight=1)
    fw = fw_cache(g)
    o = build_unweighted_prdo(g, k, seed)
    assert o.tree_counts[0] <= g.n / k
    assert o.declared_stretch == 2 * k * (2 * k + 1)
    for u, v in itertools.combinations(range(g.n), 2):
        ext = o.extract(u, v)
        p = ext.path
        assert p.vertices[0] == u and p.vertices[-1] == v
        assert p.hop_count <= len(ext.cluster_route) * (2 * k + 1)
        assert fw[u][v] <= p.total_weight <= o.declared_stretch * fw[u][v]


def test_same_cluster_path_stays_in_tree():
    g = random_connected_graph(120, 4, extra_edges=20, max_weight=1)
    o = build_unweighted_prdo(g, 3)
    for u, v in itertools.combinations(range(0, 120, 7), 2):
        if o.cluster_of[u] == o.cluster_of[v]:
            p = o.query(u, v)
            assert p.hop_count <= 6
            assert all(o.cluster_of[x] == o.cluster_of[u] for x in p.vertices)


def test_unweighted_rejects_weighted_input():
    with pytest.raises(ValueError, match="unit"):
        build_unweighted_prdo(random_connected_graph(20, 0), 2)


def test_disconnected_query_is_unreachable():
    g = WeightedGraph(6, [(0, 1, 1), (1, 2, 1), (3, 4, 1), (4, 5, 1)])
    o = build_unweighted_prdo(g, 1)
    assert isinstance(o.query(0, 5), Unreachable)
    assert o.query(3, 5).vertices == (3, 4, 5)
    with pytest.raises(ValueError):
        o.extract(0, 5)


def test_tree_route_matches_tree_distances():
    t = random_tree(50, 3, max_weight=5)
    ex = ExactOracle(t)
    # parent links by BFS from 0
    parent, height = [-1] * 50, [0] * 50
    order, seen = [0], {0}
    for x in order:
        for y in t.neighbors(x):
            if y not in seen:
                seen.add(y)
                parent[y], height[y] = x, height[x] + 1
                order.append(y)
    for a, b in itertools.product(range(50), repeat=2):
        r = tree_route(parent, height, a, b)
        assert r[0] == a and r[-1] == b and len(set(r)) == len(r)
        assert walk_weight(t, r) == ex.distance(a, b)
    assert tree_route(parent, height, 9, 9) == [9]
    leaf = next(x for x in range(50) if parent[x] == 0)
    assert tree_route(parent, height, 0, leaf) == [0, leaf]


def test_tree_route_across_trees_fails():
    parent, height = [-1, 0, -1, 2], [0, 1, 0, 1]
    with pytest.raises(ValueError, match="different trees"):
        tree_route(parent, height, 1, 3)


def test_triangle_star_round(triangle):
    s = boruvka_star_round(triangle)
    assert s.lightest == [(1, 0, 1), (1, 0, 1), (2, 1, 2)]
    assert s.root == [0, 0, 0]
    assert s.kept_parity == 0
    assert s.center == [0, 0, 2]
    assert s.star_count == 2 <= 0.75 * 3


@pytest.mark.parametrize("n", range(4, 9))
def test_equal_weight_cycles_give_star_forests(n):
    g = cycle_graph(n)
    s = boruvka_star_round(g)
    chosen = {(e[1], e[2]) for e in s.lightest}
    assert len(chosen) < n  # the lexicographic rule never closes the cycle
    check_stars(g, s)


def test_single_edge_is_one_star():
    s = boruvka_star_round(WeightedGraph(2, [(0, 1, 4)]))
    assert s.center == [0, 0] and s.star_count == 1


def check_stars(h, s):
    assert s.star_count <= 0.75 * h.n
    for x, c in enumerate(s.center):
        if c != x:
            assert s.center[c] == c  # depth at most one
            e = s.lightest[x] if (s.lightest[x][1], s.lightest[x][2]) == (min(x, c), max(x, c)) else s.lightest[c]
            assert (e[1], e[2]) == (min(x, c), max(x, c))


@pytest.mark.parametrize("seed", range(4))
def test_random_star_rounds(seed):
    g = random_connected_graph(90, seed)
    check_stars(g, boruvka_star_round(g))


def test_star_edges_are_lightest_edges_of_children():
    g = random_connected_graph(120, 9)
    s = boruvka_star_round(g)
    for x, c in enumerate(s.center):
        if c != x:
            # the star edge is the child's Borůvka edge, or the centre's when the child is the tree root
            assert (min(x, c), max(x, c)) in {(s.lightest[x][1], s.lightest[x][2]), (s.lightest[c][1], s.lightest[c][2])}


@pytest.mark.parametrize("k, l", [(1, 0), (2, 0), (4, 2), (8, 5), (16, 7)])
def test_hierarchy_depth(k, l):
    assert hierarchy_depth(k) == l


def test_degenerate_hierarchy_is_tz_on_g():
    g = random_connected_graph(80, 1)
    o = build_weighted_prdo(g, 2, seed=0)
    ref = build_tz(g, 2, 0)
    assert o.levels == 0 and o.tree_counts == [80]
    assert o.cluster_of == list(range(80))
    for u, v in [(0, 79), (5, 40), (13, 14)]:
        assert list(o.query(u, v).vertices) == loop_erase(ref.query(u, v).vertices)


@pytest.fixture(scope="module")
def weighted300():
    g = random_connected_graph(300, 17)
    return g, ExactOracle(g), build_weighted_prdo(g, 8, seed=0)


def test_tree_counts_shrink_geometrically(weighted300):
    g, _, o = weighted300
    counts = o.hierarchy.tree_counts()
    assert len(counts) == o.levels + 1 == 6
    for i, c in enumerate(counts):
        assert c <= 0.75 ** i * g.n
    for a, b in zip(counts, counts[1:]):
        assert b < a or a == 1


def test_forest_levels_are_nested(weighted300):
    g, _, o = weighted300
    h = o.hierarchy
    for lo, hi in zip(h.levels, h.levels[1:]):
        for x in range(g.n):
            for y in range(x + 1, g.n, 37):
                if lo.tree_of[x] == lo.tree_of[y]:
                    assert hi.tree_of[x] == hi.tree_of[y]
    for rnd, cg in zip(h.rounds, h.cluster_graphs):
        check_stars(cg.graph, rnd)


def test_internal_tree_paths(weighted300):
    g, ex, o = weighted300
    h = o.hierarchy
    rng = random.Random(0)
    for i in range(1, h.depth + 1):
        groups = {}
        for x, t in enumerate(h.levels[i].tree_of):
            groups.setdefault(t, []).append(x)
        for members in groups.values():
            for _ in range(min(20, len(members) - 1)):
                a, b = rng.sample(members, 2)
                assert walk_weight(g, h.route(i, a, b)) <= (3 ** i - 1) * ex.distance(a, b)


def test_weighted_extraction_and_stretch(weighted300):
    g, ex, o = weighted300
    bound = 3 ** (o.levels + 1)
    rng = random.Random(2)
    for _ in range(1500):
        u, v = rng.sample(range(g.n), 2)
        ext = o.extract(u, v)
        d = ex.distance(u, v)
        assert ext.path.vertices[0] == u and ext.path.vertices[-1] == v
        assert walk_weight(g, ext.path.vertices) == ext.path.total_weight
        assert ext.path.total_weight <= bound * (d + ext.route_weight)
        assert d <= ext.path.total_weight < o.declared_stretch * d
    assert o.query(4, 4).vertices == (4,)


def test_weighted_paths_use_the_spanner(weighted300):
    g, _, o = weighted300
    edges = o.spanner_edges()
    assert len(edges) < g.m
    for u, v in [(0, 299), (10, 150), (77, 3)]:
        assert set(o.query(u, v).edges()) <= edges
