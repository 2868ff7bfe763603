import time

import pytest

from interdiction.engine import (BudgetExceeded, Cardinality, LevelSpec, Weighted, canonical_key,
                                 decide_alternating, feasible_sets, mask_elements, time_budget, to_mask)
from interdiction.errors import ShapeError
from interdiction.qbf import Role


def test_single_exists_level():
    levels = [LevelSpec(Role.EXISTS, 2, Cardinality(1))]
    assert decide_alternating(levels, lambda s: s[0] & 1 == 1) == (True, frozenset({0}))


def test_single_forall_constant_leaf():
    levels = [LevelSpec(Role.FORALL, 3, Cardinality(2))]
    assert decide_alternating(levels, lambda s: True) == (True, None)
    assert decide_alternating(levels, lambda s: False)[0] is False


def test_two_level_knapsack_interdiction():
    items = [(1, 1), (1, 2)]
    cap, goal = 1, 2

    def leaf(state):
        attack, packing = state
        if attack & packing:
            return True   # infeasible packing: vacuous for the follower
        w = sum(items[i][0] for i in mask_elements(packing))
        p = sum(items[i][1] for i in mask_elements(packing))
        return w > cap or p < goal

    levels = [LevelSpec(Role.EXISTS, 2, Cardinality(1)), LevelSpec(Role.FORALL, 2, Cardinality(2))]
    assert decide_alternating(levels, leaf) == (True, frozenset({1}))
    assert decide_alternating(levels, leaf, prune=False) == (True, frozenset({1}))


def test_feasible_sets_order_and_excludes():
    spec = LevelSpec(Role.EXISTS, 3, Cardinality(2), excludes=(0,))
    sets = list(feasible_sets(spec, (0b010,)))
    assert sets == [0, 0b001, 0b100, 0b101]
    weighted = LevelSpec(Role.EXISTS, 3, Weighted((1, 2, 3), 3))
    assert sorted(feasible_sets(weighted)) == sorted([0, 1, 2, 4, 3])
    eligible = LevelSpec(Role.EXISTS, 3, Cardinality(3), eligible=0b110)
    assert list(feasible_sets(eligible)) == [0, 2, 4, 6]


def test_canonical_key():
    levels = [LevelSpec(Role.EXISTS, 4, Cardinality(1), group="a"),
              LevelSpec(Role.FORALL, 4, Cardinality(1), group="b"),
              LevelSpec(Role.EXISTS, 4, Cardinality(1), group="a")]
    assert canonical_key((1, 2, 4), levels, True) == canonical_key((4, 2, 1), levels, True)
    assert canonical_key((1, 2, 4), levels, True) != canonical_key((1, 4, 2), levels, True)
    assert canonical_key((1, 2)) == canonical_key((1, 2))
    assert canonical_key((1, 2)) != canonical_key((2, 1))


def test_validation():
    with pytest.raises(ShapeError):
        Cardinality(-1)
    with pytest.raises(ShapeError):
        LevelSpec(Role.EXISTS, 2, Weighted((1,), 1))
    with pytest.raises(ShapeError):
        decide_alternating([], lambda s: True)


def test_masks():
    assert to_mask([0, 3]) == 9
    assert mask_elements(9) == [0, 3]


def test_deadline_raises():
    levels = [LevelSpec(Role.EXISTS, 30, Cardinality(30))]

    def slow(state):
        time.sleep(0.001)
        return False

    with pytest.raises(BudgetExceeded):
        with time_budget(0.05):
            decide_alternating(levels + [LevelSpec(Role.FORALL, 30, Cardinality(1))], slow)
