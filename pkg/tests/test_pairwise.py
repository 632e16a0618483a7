import itertools
import random

import pytest

from spannerlab.generators import random_connected_graph
from spannerlab.graph import ExactOracle, WeightedGraph
from spannerlab.harness import size_ledger
from spannerlab.hopset import build_hopset
from spannerlab.pairwise import HopsetPairwise, PairNotRegistered, compose_hopset, exact_preserver, pairwise_v2

from conftest import walk_weight


@pytest.fixture(scope="module")
def g400():
    return random_connected_graph(400, 12)


@pytest.fixture(scope="module")
def pairs200():
    rng = random.Random(5)
    return [tuple(rng.sample(range(400), 2)) for _ in range(200)]


@pytest.fixture(scope="module")
def parts400(g400):
    return build_hopset(g400, 2, 4, 0.5, seed=1)


def test_single_pair_spanner_is_one_shortest_path():
    g = random_connected_graph(60, 3)
    ex = ExactOracle(g)
    o = exact_preserver(g, [(4, 51)])
    p = o.query(4, 51)
    assert p.total_weight == ex.distance(4, 51)
    assert o.spanner_edges() == set(p.edges())
    assert o.query(51, 4).vertices == p.vertices[::-1]


def test_pairs_on_edges_never_exceed_the_edge_weight():
    g = random_connected_graph(50, 8)
    o = exact_preserver(g, [(u, v) for u, v, _ in g.edges])
    for u, v, w in g.edges:
        assert o.query(u, v).total_weight <= w


def test_fifty_random_pairs_are_exact():
    g = random_connected_graph(300, 4)
    ex = ExactOracle(g)
    rng = random.Random(2)
    pairs = [tuple(rng.sample(range(300), 2)) for _ in range(50)]
    o = exact_preserver(g, pairs, ex)
    for u, v in pairs:
        p = o.query(u, v)
        assert p.total_weight == ex.distance(u, v) == walk_weight(g, p.vertices)


def test_disconnected_pair_rejected():
    g = WeightedGraph(4, [(0, 1, 1), (2, 3, 1)])
    with pytest.raises(ValueError):
        exact_preserver(g, [(0, 3)])


def test_unregistered_pair_is_a_structured_error():
    g = random_connected_graph(20, 1)
    o = exact_preserver(g, [(0, 1)])
    with pytest.raises(PairNotRegistered) as err:
        o.query(2, 3)
    assert err.value.as_dict() == {"error": "pair not registered", "pair": [2, 3]}


def test_empty_pair_set_has_empty_storage():
    g = random_connected_graph(20, 1)
    o = exact_preserver(g, [])
    assert o.spanner_edges() == set()
    assert size_ledger(o) == {"components": {"edges": 0, "link_entries": 0, "path_entries": 0, "tables": 0},
                              "words": 0}


def test_compose_with_exact_base_within_19(g400, pairs200, parts400):
    ex = ExactOracle(g400)
    o = compose_hopset(g400, pairs200, parts400)
    assert o.declared_stretch == 19
    for u, v in pairs200:
        p = o.query(u, v)
        d = ex.distance(u, v)
        assert p.vertices[0] == u and p.vertices[-1] == v
        assert d <= p.total_weight <= 19 * d
        assert len(o.hop_path(u, v)[0]) - 1 <= parts400.schedule.hop_budget


def test_v2_within_19_and_smaller_base(g400, pairs200, parts400):
    ex = ExactOracle(g400)
    v2 = pairwise_v2(g400, pairs200, 2, 4, parts=parts400)
    full = compose_hopset(g400, pairs200, parts400)
    for u, v in pairs200:
        p = v2.query(u, v)
        assert ex.distance(u, v) <= p.total_weight <= 19 * ex.distance(u, v)
        assert walk_weight(g400, p.vertices) == p.total_weight
    assert v2.sizes()["h3_preserver_edges"] <= full.sizes()["h_preserver_edges"]
    assert set(v2.sizes()) == {"pair_paths", "preserver_links", "h3_preserver_edges"}


def test_v2_agrees_with_compose_when_h3_is_unused(g400, pairs200, parts400):
    v2 = pairwise_v2(g400, pairs200, 2, 4, parts=parts400)
    full = compose_hopset(g400, pairs200, parts400)
    for u, v in pairs200:
        verts, flags = v2.hop_path(u, v)
        if all(parts400.part_of(a, b) != "h3" for (a, b), f in zip(zip(verts, verts[1:]), flags) if f):
            assert v2.query(u, v).total_weight == full.query(u, v).total_weight


def test_degenerate_hopset_stores_single_hops():
    g = random_connected_graph(40, 9)
    parts = build_hopset(g, 2, 4, delta=1e-12, seed=0)
    pairs = list(itertools.combinations(range(0, 40, 5), 2))
    o = compose_hopset(g, pairs, parts)
    for u, v in pairs:
        verts, flags = o.hop_path(u, v)
        if not g.has_edge(u, v):
            assert verts == (u, v) and flags == (True,)
            assert o.query(u, v).vertices == tuple(o.base.route(u, v))


def test_uncovered_hop_edge_fails_at_build(g400, parts400):
    with pytest.raises(ValueError, match="not covered"):
        HopsetPairwise(g400, [(0, 399)], parts400, exact_preserver(g400, []), "compose")


def test_empty_pairwise_v2(g400, parts400):
    o = pairwise_v2(g400, [], 2, 4, parts=parts400)
    assert o.pairs() == [] and o.spanner_edges() == set()
    assert o.sizes() == {"pair_paths": 0, "preserver_links": 0, "h3_preserver_edges": len(o.base.spanner_edges())}
    assert o.ledger()["path_entries"] == o.base.ledger()["path_entries"]
