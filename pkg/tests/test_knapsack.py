import random

import pytest
from hypothesis import given, settings, strategies as st

from interdiction import knapsack
from interdiction.engine import to_mask
from interdiction.errors import ParseError, ShapeError, SizeLimitError
from interdiction.knapsack import (KnapsackItem, KnapsackOracle, kp_max_profit, make_umik, ubik_decide,
                                   umik_decide, umik_from_json, umik_to_json, umik_unit_fastpath, utik_decide)
from oracles import brute_kp, brute_ubik, brute_utik, dp_kp

pairs_strategy = st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), max_size=9)


def items_of(pairs):
    return [KnapsackItem(w, p) for w, p in pairs]


def test_kp_examples():
    assert kp_max_profit(items_of([(2, 3), (2, 4)]), 2) == 4
    assert kp_max_profit([], 5) == 0
    assert kp_max_profit(items_of([(1, 1)]), 0) == 0
    with pytest.raises(ShapeError):
        kp_max_profit([], -1)
    with pytest.raises(SizeLimitError):
        kp_max_profit(items_of([(1, 1)] * 26), 3)


@settings(max_examples=300, deadline=None)
@given(pairs_strategy, st.integers(0, 40))
def test_kp_matches_two_oracles(pairs, cap):
    got = kp_max_profit(items_of(pairs), cap)
    assert got == brute_kp(pairs, cap) == dp_kp(pairs, cap)


@settings(max_examples=200, deadline=None)
@given(pairs_strategy, st.integers(0, 40), st.data())
def test_oracle_queries(pairs, cap, data):
    oracle = KnapsackOracle(items_of(pairs), cap)
    excluded = data.draw(st.sets(st.integers(0, max(len(pairs) - 1, 0))) if pairs else st.just(set()))
    forced = data.draw(st.sets(st.integers(0, max(len(pairs) - 1, 0))) if pairs else st.just(set()))
    ex = to_mask(excluded)
    assert oracle.max_profit(ex) == brute_kp(pairs, cap, excluded)
    fmask = to_mask(forced)
    want = -1
    if not forced & excluded:
        fw = sum(pairs[i][0] for i in forced)
        if fw <= cap:
            rest = [pairs[i] for i in range(len(pairs)) if i not in forced and i not in excluded]
            want = sum(pairs[i][1] for i in forced) + brute_kp(rest, cap - fw)
    assert oracle.max_profit_with(fmask, ex) == want


def test_ubik_examples():
    assert ubik_decide(make_umik([(1, 1)], 1, 1, [0]))[0] is False
    assert ubik_decide(make_umik([(1, 1)], 1, 1, [1])) == (True, frozenset({0}))
    with pytest.raises(ShapeError):
        ubik_decide(make_umik([(1, 1)], 1, 1, [1, 1]))


def test_utik_examples():
    assert utik_decide(make_umik([(1, 1)], 1, 1, [1, 1]))[0] is True
    assert utik_decide(make_umik([(1, 1)], 1, 1, [1, 0]))[0] is False


def test_umik_three_rounds_single_item():
    # top round attacks the only item, so the follower stays below the goal
    inst = make_umik([(1, 1)], 1, 1, [1, 1, 1])
    assert umik_decide(inst)[0] is True
    assert umik_decide(inst, prune=False)[0] is True


def _random_umik(rng, m):
    n = rng.randint(1, 5)
    pairs = [(rng.randint(1, 6), rng.randint(1, 6)) for _ in range(n)]
    return make_umik(pairs, rng.randint(1, sum(w for w, _ in pairs)), rng.randint(1, sum(p for _, p in pairs)),
                     [rng.randint(0, 2) for _ in range(m)])


def test_umik_reduces_to_ubik_and_utik():
    rng = random.Random(5)
    for _ in range(20):
        inst = _random_umik(rng, 1)
        assert umik_decide(inst)[0] == ubik_decide(inst)[0]
        pairs = [(it.weight, it.profit) for it in inst.items]
        assert ubik_decide(inst)[0] == brute_ubik(pairs, inst.capacity, inst.goal, inst.budget(2))
    for _ in range(20):
        inst = _random_umik(rng, 2)
        assert umik_decide(inst)[0] == utik_decide(inst)[0]
        pairs = [(it.weight, it.profit) for it in inst.items]
        assert utik_decide(inst)[0] == brute_utik(pairs, inst.capacity, inst.goal, inst.budget(3), inst.budget(2))


def test_pruned_and_unpruned_agree():
    rng = random.Random(11)
    for m in (1, 2, 3):
        for _ in range(15):
            inst = _random_umik(rng, m)
            assert umik_decide(inst)[0] == umik_decide(inst, prune=False)[0]


def test_unit_fastpath_examples():
    unit_profit = make_umik([(3, 1), (2, 1), (1, 1)], 3, 2, [1])
    assert umik_unit_fastpath(unit_profit) == umik_decide(unit_profit)[0]
    unit_weight = make_umik([(1, 5), (1, 1)], 1, 5, [1])
    assert umik_unit_fastpath(unit_weight) is True
    same = make_umik([(2, 1)] * 4, 4, 2, [2])
    assert umik_unit_fastpath(same) == umik_decide(same)[0]
    with pytest.raises(ShapeError):
        umik_unit_fastpath(make_umik([(2, 3)], 2, 3, [1]))


def test_unit_fastpath_matches_exact_decider():
    rng = random.Random(2)
    for _ in range(150):
        m = rng.randint(1, 3)
        n = rng.randint(1, 5)
        if rng.random() < 0.5:
            pairs = [(1, rng.randint(1, 6)) for _ in range(n)]
        else:
            pairs = [(rng.randint(1, 6), 1) for _ in range(n)]
        inst = make_umik(pairs, rng.randint(0, sum(w for w, _ in pairs)), rng.randint(1, n * 6),
                         [rng.randint(0, 2) for _ in range(m)])
        assert umik_unit_fastpath(inst) == umik_decide(inst)[0], inst


def test_round_limit():
    with pytest.raises(SizeLimitError):
        umik_decide(make_umik([(1, 1)], 1, 1, [1] * 5))


def test_json_round_trip_keeps_big_integers():
    inst = make_umik([(10 ** 30, 10 ** 31 + 7)], 10 ** 30, 5, [1])
    data = umik_to_json(inst)
    assert data["items"][0]["p"] == str(10 ** 31 + 7)
    assert umik_from_json(data) == inst
    with pytest.raises(ParseError):
        umik_from_json({"items": []})
    with pytest.raises(ParseError):
        umik_from_json({**data, "m": 2})


def test_dumps_is_stable():
    inst = make_umik([(1, 2)], 1, 1, [1])
    assert knapsack.dumps(umik_to_json(inst)) == knapsack.dumps(umik_to_json(inst))
