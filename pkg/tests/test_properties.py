"""Randomized monotonicity invariants of the game solvers.

The check_* functions are shared with the acceptance suite, which drives
them from counted seeded loops.
"""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from interdiction.engine import to_mask
from interdiction.flow import Arc, FlowNetwork, max_flow
from interdiction.knapsack import KnapsackItem, KnapsackOracle, make_umik, ubik_decide, utik_decide
from interdiction.mcn import ProtectionOracle, make_mcn
from interdiction.paths import SpArc, SpGraph, shortest_path
from interdiction.powergrid import Generator, GridInstance, Line, min_load_shed

CASES = settings(max_examples=500, deadline=None)


def check_knapsack_budgets(pairs, cap, goal, attack, fortify, excluded, extra):
    low = ubik_decide(make_umik(pairs, cap, goal, [attack]))[0]
    assert not low or ubik_decide(make_umik(pairs, cap, goal, [attack + 1]))[0]
    base = utik_decide(make_umik(pairs, cap, goal, [attack, fortify]))[0]
    # more fortification never hurts the defender, more attack never helps it
    assert not base or utik_decide(make_umik(pairs, cap, goal, [attack, fortify + 1]))[0]
    assert base or not utik_decide(make_umik(pairs, cap, goal, [attack + 1, fortify]))[0]
    oracle = KnapsackOracle([KnapsackItem(w, p) for w, p in pairs], cap)
    ex = to_mask(i for i in excluded if i < len(pairs))
    assert oracle.max_profit(ex | 1 << (extra % len(pairs))) <= oracle.max_profit(ex)
    assert oracle.max_profit(ex, cap + 1) >= oracle.max_profit(ex)


def check_arc_removal(n, arcs, removed, extra):
    mask = to_mask(removed)
    more = mask | (1 << extra if arcs else 0)
    net = FlowNetwork(n, tuple(Arc(u, v, c) for (u, v), c in arcs), 0, n - 1)
    assert max_flow(net, more) <= max_flow(net, mask)
    g = SpGraph(n, tuple(SpArc(u, v, c, 1) for (u, v), c in arcs), 0, n - 1)
    assert shortest_path(g, more) >= shortest_path(g, mask)


def check_mcn(n, edges, vaccinated, infected, protected, extra):
    oracle = ProtectionOracle(make_mcn(n, edges, 0, 0, 0, 0))
    d = to_mask(vaccinated)
    i = to_mask(infected) & ~d
    p = to_mask(protected) & ~i
    base = oracle.saved_after(d, i, p)
    if not i >> extra & 1:
        assert oracle.saved_after(d, i, p | 1 << extra) >= base
    if not (d | p) >> extra & 1:
        assert oracle.saved_after(d, i | 1 << extra, p) <= base


def radial_grid(demands, cap, lines):
    """`lines` holds (parent, capacity, reactance) for buses 1.. in order."""
    gen = Generator(0, Fraction(cap), Fraction(cap), Fraction(0), Fraction(cap))
    return GridInstance((Fraction(0),) + tuple(Fraction(d) for d in demands), (gen,),
                        tuple(Line(parent, b, Fraction(c), Fraction(x), 1)
                              for b, (parent, c, x) in enumerate(lines, 1)),
                        0, 0, Fraction(0))


def check_grid_attack(grid, attacked, extra):
    # radial grids only: on a meshed grid a zero-capacity line can pin a parallel
    # path, so cutting it lowers the shed
    base = min_load_shed(grid, attacked).total_shed
    assert min_load_shed(grid, set(attacked) | {extra}).total_shed >= base


items = st.lists(st.tuples(st.integers(1, 6), st.integers(1, 6)), min_size=1, max_size=5)


@st.composite
def arc_lists(draw, max_nodes=6, max_arcs=10):
    n = draw(st.integers(2, max_nodes))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
    arcs = draw(st.lists(st.tuples(pair, st.integers(0, 9)), max_size=max_arcs))
    removed = draw(st.sets(st.integers(0, max(len(arcs) - 1, 0)))) if arcs else set()
    extra = draw(st.integers(0, max(len(arcs) - 1, 0)))
    return n, arcs, removed, extra


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 8))
    edges = set()
    if n > 1:
        for u, v in draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=12)):
            if u != v:
                edges.add((min(u, v), max(u, v)))
    subset = st.sets(st.integers(0, n - 1))
    return n, sorted(edges), draw(subset), draw(subset), draw(subset), draw(st.integers(0, n - 1))


@st.composite
def grids(draw):
    n = draw(st.integers(2, 5))
    demands = [draw(st.integers(0, 6)) for _ in range(n - 1)]
    lines = [(draw(st.integers(0, b - 1)), draw(st.integers(0, 8)), draw(st.integers(1, 3))) for b in range(1, n)]
    grid = radial_grid(demands, draw(st.integers(0, 20)), lines)
    return grid, draw(st.sets(st.integers(0, n - 2))), draw(st.integers(0, n - 2))


@CASES
@given(items, st.integers(0, 30), st.integers(1, 30), st.integers(0, 3), st.integers(0, 2),
       st.sets(st.integers(0, 4)), st.integers(0, 4))
def test_knapsack_budget_monotone(pairs, cap, goal, attack, fortify, excluded, extra):
    check_knapsack_budgets(pairs, cap, goal, attack, fortify, excluded, extra)


@CASES
@given(arc_lists())
def test_arc_removal_monotone(case):
    check_arc_removal(*case)


@CASES
@given(graphs())
def test_mcn_protection_and_infection_monotone(case):
    check_mcn(*case)


@CASES
@given(grids())
def test_grid_attack_monotone(case):
    check_grid_attack(*case)
