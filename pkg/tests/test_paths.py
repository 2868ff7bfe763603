import math
import random

import pytest

from interdiction import paths
from interdiction.engine import to_mask
from interdiction.errors import ParseError, ShapeError, SizeLimitError
from interdiction.knapsack import make_umik, ubik_decide
from interdiction.paths import SpArc, SpGraph, SpipufInstance, shortest_path, spipuf_decide
from oracles import all_paths_shortest


def random_graph(rng, max_arcs=12):
    n = rng.randint(2, 6)
    arcs = []
    for _ in range(rng.randint(0, max_arcs)):
        u, v = rng.sample(range(n), 2)
        arcs.append(SpArc(u, v, rng.randint(0, 9), rng.randint(0, 4)))
    return SpGraph(n, tuple(arcs), 0, n - 1)


def test_chain():
    g = SpGraph(3, (SpArc(0, 1, 1, 1), SpArc(1, 2, 1, 1)), 0, 2)
    assert shortest_path(g) == 2
    assert shortest_path(g, 1) == paths.UNREACHABLE == math.inf


def test_dijkstra_matches_path_enumeration():
    rng = random.Random(1)
    for _ in range(500):
        g = random_graph(rng)
        removed = [i for i in range(len(g.arcs)) if rng.random() < 0.25]
        triples = [(a.u, a.v, a.length) for a in g.arcs]
        assert shortest_path(g, to_mask(removed)) == all_paths_shortest(g.num_nodes, triples, g.s, g.t, removed)


def test_decide_examples():
    g = SpGraph(2, (SpArc(0, 1, 1, 1),), 0, 1)
    assert spipuf_decide(SpipufInstance(g, 1, 1, 2)) == (True, frozenset({0}))
    assert spipuf_decide(SpipufInstance(g, 0, 1, 2))[0] is False


def test_gadget_values():
    inst, prov = paths.compile_ubik_to_spipuf(make_umik([(2, 5)], 7, 3, [1]))
    assert [(a.length, a.cost) for a in inst.graph.arcs] == [(7, 8), (1, 2), (1, 8)]
    u = make_umik([(1, 1), (2, 2), (3, 3)], 4, 10, [1])
    inst, prov = paths.compile_ubik_to_spipuf(u)
    assert inst.graph.num_nodes == 7 and len(inst.graph.arcs) == 9
    assert inst.goal == 16
    assert len(prov) == 9
    with pytest.raises(ShapeError):
        paths.compile_ubik_to_spipuf(make_umik([(1, 1)], 1, 1, [1, 1]))


def test_reduction_and_pruning_agree_with_knapsack():
    rng = random.Random(4)
    for _ in range(60):
        n = rng.randint(1, 4)
        pairs = [(rng.randint(1, 5), rng.randint(1, 7)) for _ in range(n)]
        u = make_umik(pairs, rng.randint(1, sum(w for w, _ in pairs)), rng.randint(1, sum(p for _, p in pairs)),
                      [rng.randint(1, n)])
        inst, _ = paths.compile_ubik_to_spipuf(u)
        want = ubik_decide(u)[0]
        assert spipuf_decide(inst)[0] == want
        assert spipuf_decide(inst, prune=False)[0] == want


def test_guard_and_validation():
    g = SpGraph(2, tuple(SpArc(0, 1, 1, 1) for _ in range(37)), 0, 1)
    with pytest.raises(SizeLimitError):
        spipuf_decide(SpipufInstance(g, 0, 1, 1))
    with pytest.raises(ShapeError):
        SpGraph(2, (SpArc(0, 3, 1, 1),), 0, 1)
    with pytest.raises(ShapeError):
        SpipufInstance(SpGraph(2, (), 0, 1), -1, 0, 0)


def test_json_and_dot():
    inst, _ = paths.compile_ubik_to_spipuf(make_umik([(2, 5), (1, 1)], 2, 3, [1]))
    assert paths.spipuf_from_json(paths.spipuf_to_json(inst)) == inst
    with pytest.raises(ParseError):
        paths.spipuf_from_json({"arcs": "x"})
    assert "color=red" in paths.graph_dot(inst.graph, attacked=(1,))
