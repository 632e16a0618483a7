"""Randomized invariants, each checked against an independent brute force."""
import itertools

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from spannerlab.cluster_prdo import boruvka_star_round, build_unweighted_prdo, loop_erase, tree_route, unweighted_clustering
from spannerlab.generators import random_connected_graph, random_tree
from spannerlab.graph import ExactOracle, WeightedGraph, dump_graph, load_graph
from spannerlab.harness import sample_pairs
from spannerlab.pairwise import exact_preserver
from spannerlab.reductions import prefix_function
from spannerlab.tz import build_tz

from conftest import floyd_warshall, walk_weight

FAST = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def graphs(draw, max_n=24, max_weight=9):
    n = draw(st.integers(2, max_n))
    seed = draw(st.integers(0, 10 ** 6))
    extra = draw(st.integers(0, 2 * n))
    return random_connected_graph(n, seed, extra, max_weight)


@st.composite
def any_graphs(draw):
    """Possibly disconnected, possibly with parallel lines in the input."""
    n = draw(st.integers(1, 12))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, 5)), max_size=30))
    return WeightedGraph(n, [(u, v, w) for u, v, w in edges if u != v])


@FAST
@given(any_graphs())
def test_exact_oracle_agrees_with_floyd_warshall(g):
    fw = floyd_warshall(g)
    ex = ExactOracle(g)
    for u, v in itertools.combinations(range(g.n), 2):
        d = ex.distance(u, v)
        if fw[u][v] == float("inf"):
            assert d is None and not ex.path(u, v)
        else:
            p = ex.path(u, v)
            assert d == fw[u][v] == walk_weight(g, p.vertices)


@FAST
@given(any_graphs())
def test_dump_load_is_identity(g):
    assert load_graph(dump_graph(g)) == g


@FAST
@given(graphs(), st.integers(1, 4), st.integers(0, 99))
def test_tz_stretch_bound(g, k, seed):
    k = min(k, max(1, g.n.bit_length()))
    fw = floyd_warshall(g)
    o = build_tz(g, k, seed)
    for u, v in itertools.combinations(range(g.n), 2):
        p = o.query(u, v)
        assert p.vertices[0] == u and p.vertices[-1] == v
        assert fw[u][v] <= p.total_weight <= (2 * k - 1) * fw[u][v]


@FAST
@given(graphs(), st.data())
def test_preserver_answers_exactly_inside_its_spanner(g, data):
    pairs = data.draw(st.lists(st.tuples(st.integers(0, g.n - 1), st.integers(0, g.n - 1)), max_size=8))
    pairs = [(u, v) for u, v in pairs if u != v]
    o = exact_preserver(g, pairs)
    fw = floyd_warshall(g)
    edges = o.spanner_edges()
    for u, v in pairs:
        p = o.query(u, v)
        assert p.total_weight == fw[u][v]
        assert set(p.edges()) <= edges


@FAST
@given(graphs(max_weight=1, max_n=40), st.integers(1, 5))
def test_unweighted_clusters(g, k):
    c = unweighted_clustering(g, k)
    assert c.radius() <= k
    assert c.count <= (g.n - 1) // (k + 1) + 1
    for x in range(g.n):
        route = tree_route(c.parent, c.height, x, c.roots[c.cluster_of[x]])
        assert all(c.cluster_of[y] == c.cluster_of[x] for y in route)


@FAST
@given(graphs(max_weight=1, max_n=30), st.integers(1, 3), st.integers(0, 50))
def test_unweighted_prdo_stretch(g, k, seed):
    o = build_unweighted_prdo(g, k, seed)
    fw = floyd_warshall(g)
    for u, v in itertools.combinations(range(g.n), 2):
        ext = o.extract(u, v)
        assert ext.path.hop_count <= len(ext.cluster_route) * (2 * k + 1)
        assert ext.path.total_weight <= o.declared_stretch * fw[u][v]


@FAST
@given(graphs(max_weight=3, max_n=30))
def test_star_rounds(g):
    s = boruvka_star_round(g)
    assert s.star_count <= 0.75 * g.n
    for x, c in enumerate(s.center):
        assert s.center[c] == c
        if c != x:
            assert g.has_edge(x, c)


@FAST
@given(st.integers(2, 40), st.integers(0, 999))
def test_tree_route_is_the_tree_path(n, seed):
    t = random_tree(n, seed, max_weight=4)
    ex = ExactOracle(t)
    parent, height, order = [-1] * n, [0] * n, [0]
    for x in order:
        for y in t.neighbors(x):
            if y != parent[x]:
                parent[y], height[y] = x, height[x] + 1
                order.append(y)
    for a, b in itertools.combinations(range(n), 2):
        assert walk_weight(t, tree_route(parent, height, a, b)) == ex.distance(a, b)


@FAST
@given(st.lists(st.integers(0, 6), min_size=1, max_size=30))
def test_loop_erase_gives_a_simple_subwalk(route):
    out = loop_erase(route)
    assert len(set(out)) == len(out)
    assert out[0] == route[0] and out[-1] == route[-1]
    it = iter(route)
    assert all(x in it for x in out)  # subsequence


@FAST
@given(st.integers(4, 5000), st.integers(1, 6))
def test_prefix_functions_are_exact_floors(n, i):
    f = prefix_function(n, "pow2", i)
    e = 2 ** i
    assert f ** e <= n ** (e - 1) < (f + 1) ** e
    assert prefix_function(n, "pow2", i + 1) >= f


@FAST
@given(st.integers(2, 60), st.integers(0, 3000), st.integers(0, 10 ** 6))
def test_sample_pairs_distinct_and_ordered(n, count, seed):
    pairs = sample_pairs(n, count, seed)
    assert len(pairs) == min(count, n * (n - 1) // 2)
    assert len(set(pairs)) == len(pairs)
    assert all(0 <= u < v < n for u, v in pairs)
