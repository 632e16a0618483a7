import itertools
import math

import pytest

from spannerlab.generators import heawood, mcgee, path_graph, petersen, random_connected_graph, random_tree
from spannerlab.graph import (
    INF,
    ExactOracle,
    GraphFormatError,
    PairSet,
    PathRecord,
    Unreachable,
    WeightedGraph,
    bounded_hop_path,
    dump_graph,
    girth,
    join_walks,
    load_graph,
    load_pairs,
    search_forest,
    shortest_path,
)

from conftest import floyd_warshall, walk_weight


def simple_paths(g, u, v):
    """Every simple u-v path, by exhaustive DFS."""
    out = []

    def dfs(x, seen, route):
        if x == v:
            out.append(tuple(route))
            return
        for y in g.neighbors(x):
            if y not in seen:
                seen.add(y)
                route.append(y)
                dfs(y, seen, route)
                route.pop()
                seen.discard(y)

    dfs(u, {u}, [u])
    return out


def test_load_graph_path_of_three():
    g = load_graph("n 3\n0 1 1.0\n1 2 2.0\n")
    assert g.m == 2
    assert ExactOracle(g).distance(0, 2) == 3.0


def test_duplicate_lines_collapse_to_lightest():
    g = load_graph("n 2\n0 1 5\n0 1 2\n")
    assert g.edges == ((0, 1, 2),)


def test_self_loop_reports_its_line():
    with pytest.raises(GraphFormatError) as err:
        load_graph("n 3\n# comment\n0 1 1\n0 0 1\n")
    assert err.value.line == 4


@pytest.mark.parametrize(
    "text, line",
    [
        ("0 1 1\n", 1),
        ("n 3\n0 1\n", 2),
        ("n 3\n0 5 1\n", 2),
        ("n 3\n0 1 -2\n", 2),
        ("n 3\n0 1 x\n", 2),
        ("", 1),
    ],
)
def test_malformed_documents(text, line):
    with pytest.raises(GraphFormatError) as err:
        load_graph(text)
    assert err.value.line == line


def test_dump_load_round_trip():
    g = random_connected_graph(30, 4)
    assert load_graph(dump_graph(g)) == g
    h = WeightedGraph(3, [(0, 1, 0.5), (1, 2, 1.25)])
    assert load_graph(dump_graph(h)) == h


def test_integer_weights_stay_exact():
    g = load_graph("n 2\n0 1 3\n")
    assert g.integral and isinstance(g.edges[0][2], int)


def test_triangle_tie_break(triangle):
    p = shortest_path(triangle, 0, 2)
    assert p.vertices == (0, 1, 2) and p.total_weight == 3
    # both weight-3 routes exist; the chosen one is the lexicographically smaller
    routes = sorted(r for r in simple_paths(triangle, 0, 2) if walk_weight(triangle, r) == 3)
    assert routes == [(0, 1, 2), (0, 2)]
    assert shortest_path(triangle, 2, 0).vertices == (2, 0)


def test_same_endpoint_is_empty_path(triangle):
    p = shortest_path(triangle, 1, 1)
    assert p.vertices == (1,) and p.total_weight == 0 and p.hop_count == 0


def test_petersen_adjacent_pairs_are_single_edges():
    g = petersen()
    for u, v, _ in g.edges:
        p = shortest_path(g, u, v)
        assert p.vertices == (u, v) and p.total_weight == 1


def test_unreachable_is_explicit_and_falsy():
    g = WeightedGraph(4, [(0, 1, 1), (2, 3, 1)])
    r = shortest_path(g, 0, 3)
    assert isinstance(r, Unreachable) and not r
    assert ExactOracle(g).distance(0, 3) is None


@pytest.mark.parametrize("seed", range(4))
def test_exact_oracle_matches_floyd_warshall(seed):
    g = random_connected_graph(40, seed, extra_edges=60)
    fw = floyd_warshall(g)
    ex = ExactOracle(g)
    for u, v in itertools.combinations(range(g.n), 2):
        assert ex.distance(u, v) == fw[u][v]
        p = ex.path(u, v)
        assert p.vertices[0] == u and p.vertices[-1] == v
        assert walk_weight(g, p.vertices) == fw[u][v] == p.total_weight


@pytest.mark.parametrize("seed", range(6))
def test_reported_path_is_lexicographically_smallest(seed):
    # weights in {1, 2} make ties common; compare with exhaustive enumeration
    g = random_connected_graph(9, seed, extra_edges=10, max_weight=2)
    ex = ExactOracle(g)
    for u, v in itertools.permutations(range(g.n), 2):
        d = ex.distance(u, v)
        best = min(r for r in simple_paths(g, u, v) if walk_weight(g, r) == d)
        assert ex.path(u, v).vertices == best


def test_search_forest_multi_source_labels():
    g = path_graph(5)
    f = search_forest(g, [0, 4])
    assert f.dist == [0, 1, 2, 1, 0]
    assert f.root == [0, 0, 0, 4, 4]  # vertex 2 is equidistant; smaller source wins
    assert f.route(2) == [2, 1, 0]


def test_search_forest_limit_is_strict():
    g = path_graph(4)
    f = search_forest(g, [0], limit=[INF, INF, 2, INF])
    assert f.reached(1) and not f.reached(2) and not f.reached(3)


def test_bounded_hop_examples():
    g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1)])
    p = bounded_hop_path(g, [(0, 2, 2)], 0, 2, beta=1)
    assert p.vertices == (0, 2) and p.total_weight == 2 and p.via_extra == (True,)
    q = bounded_hop_path(g, [], 0, 2, beta=2)
    assert q.vertices == (0, 1, 2) and q.total_weight == 2
    assert bounded_hop_path(g, [], 0, 2, beta=1) is None


def test_complete_distance_extra_makes_one_hop_exact():
    g = random_connected_graph(25, 3)
    fw = floyd_warshall(g)
    extra = [(u, v, fw[u][v]) for u, v in itertools.combinations(range(g.n), 2)]
    for u, v in itertools.combinations(range(g.n), 2):
        assert bounded_hop_path(g, extra, u, v, 1).total_weight == fw[u][v]


def hop_dp(g, extra, u, beta):
    """Textbook layered DP: best[h][x] = lightest walk with at most h edges."""
    edges = [(a, b, w) for a, b, w in g.edges] + list(extra)
    best = [0 if x == u else math.inf for x in range(g.n)]
    for _ in range(beta):
        nxt = list(best)
        for a, b, w in edges:
            nxt[b] = min(nxt[b], best[a] + w)
            nxt[a] = min(nxt[a], best[b] + w)
        best = nxt
    return best


@pytest.mark.parametrize("beta", [1, 2, 3, 5])
def test_bounded_hop_path_matches_layered_dp(beta):
    g = random_connected_graph(30, 11, extra_edges=20)
    extra = [(0, 17, 9), (3, 22, 4), (5, 29, 12)]
    for u in (0, 3, 7):
        ref = hop_dp(g, extra, u, beta)
        for v in range(g.n):
            p = bounded_hop_path(g, extra, u, v, beta)
            if ref[v] == math.inf:
                assert p is None
                continue
            assert p.total_weight == ref[v] and p.hop_count <= beta
            extra_keys = {(min(a, b), max(a, b)): w for a, b, w in extra}
            total = 0
            for (a, b), flag in zip(zip(p.vertices, p.vertices[1:]), p.via_extra):
                total += extra_keys[(min(a, b), max(a, b))] if flag else g.weight(a, b)
            assert total == p.total_weight


@pytest.mark.parametrize("make, expected", [(petersen, 5), (heawood, 6), (mcgee, 7)])
def test_cage_girths(make, expected):
    g = make()
    assert girth(g) == expected
    assert {g.degree(x) for x in range(g.n)} == {3}


def test_girth_trivial_cases(triangle):
    assert girth(random_tree(20, 1)) == INF
    assert girth(triangle) == 3


def test_path_record_rejects_non_edges(triangle):
    g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(KeyError):
        PathRecord.along(g, [0, 2])
    assert join_walks(g, [[0, 1], [1, 2]]).vertices == (0, 1, 2)
    assert PathRecord((0, 1, 2), 2).reversed().vertices == (2, 1, 0)
    assert PathRecord((0, 1, 0, 1, 2), 4).simplified() == [0, 1, 2]


def test_pair_sets():
    ps = PairSet.of([(0, 1), (1, 0), (2, 3)])
    assert list(ps) == [(0, 1), (2, 3)]
    assert len(load_pairs("0 1\n# x\n3 2\n", 4)) == 2
    with pytest.raises(GraphFormatError):
        load_pairs("0 9\n", 4)
    with pytest.raises(GraphFormatError):
        load_pairs("1 1\n", 4)
