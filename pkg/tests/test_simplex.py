import random
from fractions import Fraction

import pytest

from interdiction import simplex
from interdiction.simplex import solve_lp
from oracles import vertex_lp


def test_small_example():
    # max x + y with x + 2y <= 4, 3x + y <= 6
    res = solve_lp([-1, -1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == simplex.OPTIMAL
    assert res.objective == Fraction(-14, 5)
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]
    assert res.dual_objective == res.objective


def test_infeasible_and_unbounded():
    assert solve_lp([1], [[1]], [-1]).status == simplex.INFEASIBLE
    assert solve_lp([1, 0], a_eq=[[1, 1]], b_eq=[-2]).status == simplex.INFEASIBLE
    assert solve_lp([-1], [[-1]], [3]).status == simplex.UNBOUNDED


def test_row_length_checked():
    with pytest.raises(ValueError):
        solve_lp([1, 1], [[1]], [1])


def test_equality_rows():
    res = solve_lp([1, 2], a_eq=[[1, 1]], b_eq=[3])
    assert res.objective == 3 and res.x == [3, 0]


def test_matches_vertex_enumeration():
    rng = random.Random(6)
    for _ in range(200):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        a = [[rng.randint(-3, 5) for _ in range(n)] for _ in range(m)]
        b = [rng.randint(-2, 8) for _ in range(m)]
        # a box keeps every feasible region bounded
        a += [[1 if j == i else 0 for j in range(n)] for i in range(n)]
        b += [rng.randint(1, 6) for _ in range(n)]
        c = [rng.randint(-5, 5) for _ in range(n)]
        res = solve_lp(c, a, b)
        want = vertex_lp(c, a, b)
        if want is None:
            assert res.status == simplex.INFEASIBLE
        else:
            assert res.status == simplex.OPTIMAL and res.objective == want
            assert res.dual_objective == res.objective
            assert simplex.dual_feasible(res, c, a)
