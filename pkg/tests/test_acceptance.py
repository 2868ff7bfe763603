"""Acceptance criteria, one test each.

Every test prints a single PASS/FAIL line (visible even under output capture)
and then asserts at the stated tolerance.
"""

import random
import time

from interdiction import flow, harness, knapsack_reduction as kr, mcn, paths, powergrid
from interdiction.engine import time_budget, to_mask
from interdiction.harness import FamilySpec, check_equivalence, compile_for, family_formulas, run_property_suite
from interdiction.knapsack import ubik_decide
from interdiction.qbf import random_qbf
from oracles import brute_min_cut
from tables import differences, load_expected, parse_rendered
import test_properties as invariants

UBIK_EXHAUSTIVE = FamilySpec("ubik", block_sizes=((1, 1), (1, 2), (2, 1), (2, 2)), clauses=(1, 2), exhaustive=True)
UBIK_RANDOM = FamilySpec("ubik", block_sizes=((2, 2),), clauses=(3, 3), count=200)
UTIK_FAMILY = FamilySpec("utik", block_sizes=((1, 1, 1), (1, 1, 2)), clauses=(1, 2), count=100)
UMIK_FAMILY = FamilySpec("umik", block_sizes=((1, 1, 1, 1),), clauses=(1, 2), count=50)
FLOW_FAMILY = FamilySpec("umfipf", block_sizes=((1, 2),), clauses=(1, 2), count=100)
MCN_FAMILY = FamilySpec("umcn", block_sizes=((1, 1, 1),), clauses=(1, 2), count=50, deadline=600)
KNAPSACK_SOURCES = FamilySpec("spipuf", count=200, items=(5, 5, 7))

# six vertices, 0-indexed: the worked play vaccinates 2, infects 1, protects 0
FIG3_EDGES = [(0, 3), (0, 1), (1, 5), (0, 2), (1, 2), (2, 4), (2, 3), (4, 5)]


def verdict(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def agreement(report):
    return f"{len(report.records) - len(report.disagreements)}/{len(report.records)} agree"


def test_criterion_01_figure_tables(capsys):
    t = time.perf_counter()
    fig1, fig2 = harness.figure_artifacts()
    item = {fig1.item_name(i, "abcd"): it for i, it in enumerate(fig1.instance.items)}
    values_ok = (item["i_a"].weight == 100_000_101 and item["i_a"].profit == 1_100_000_101
                 and item["i_c"].weight == item["i_c"].profit == 10_001
                 and item["j'_a"].profit == 10_000_000)
    diff1 = differences(load_expected("ubik_worked_example.txt"), parse_rendered(kr.render_table(fig1, "abcd")))
    rendered2 = parse_rendered(kr.render_table(fig2, "abcd"))
    rows_ok = (rendered2[("W", "-")] == [0, 1, 2, 0, 1, 1, 4, 4, 4]
               and rendered2[("K", "-")] == [3, 1, 1, 1, 1, 1, 4, 4, 4])
    diff2 = differences(load_expected("utik_worked_example.txt"), rendered2)
    # the stored table marks clause 3 in both i_~c rows although ~c is not in that clause
    known = [(("p", "i_~c"), 8, 1, 0), (("w", "i_~c"), 8, 1, 0)]
    seconds = time.perf_counter() - t
    ok = values_ok and not diff1 and rows_ok and diff2 == known and seconds < 1
    verdict(capsys, 1, ok, f"figure 1 differences {diff1}, figure 2 W/K rows {'match' if rows_ok else 'differ'}, "
                           f"other figure 2 differences {[d for d in diff2 if d not in known]}, {seconds:.2f}s")


def test_criterion_02_ubik_equivalence(capsys):
    t = time.perf_counter()
    exhaustive = check_equivalence(UBIK_EXHAUSTIVE)
    sampled = check_equivalence(UBIK_RANDOM)
    seconds = time.perf_counter() - t
    ok = not exhaustive.disagreements and not sampled.disagreements and seconds < 300
    verdict(capsys, 2, ok, f"exhaustive {agreement(exhaustive)}, random {agreement(sampled)}, {seconds:.1f}s")


def test_criterion_03_utik_equivalence(capsys):
    t = time.perf_counter()
    report = check_equivalence(UTIK_FAMILY)
    seconds = time.perf_counter() - t
    verdict(capsys, 3, not report.disagreements and seconds < 600, f"{agreement(report)}, {seconds:.1f}s")


def test_criterion_04_umik(capsys):
    report = check_equivalence(UMIK_FAMILY)
    same = 0
    for seed in range(20):
        rng = random.Random(f"shared:{seed}")
        q2 = random_qbf(rng.randrange(2 ** 32), [rng.randint(1, 2), rng.randint(1, 2)], rng.randint(1, 3), True)
        q3 = random_qbf(rng.randrange(2 ** 32), [1, rng.randint(1, 2), rng.randint(1, 2)], rng.randint(1, 3))
        same += (kr.compile_qbf_to_umik(q2) == kr.compile_b2_to_ubik(q2)
                 and kr.compile_qbf_to_umik(q3) == kr.compile_b3_to_utik(q3))
    ok = not report.disagreements and same == 20
    verdict(capsys, 4, ok, f"m=3 {agreement(report)}, m=1/m=2 compilers identical on {same}/20 formulas")


def test_criterion_05_flow(capsys):
    t = time.perf_counter()
    report = check_equivalence(FLOW_FAMILY)
    rng = random.Random(5)
    cut_ok = 0
    for _ in range(500):
        n = rng.randint(2, 6)
        arcs = [(*rng.sample(range(n), 2), rng.randint(0, 9)) for _ in range(rng.randint(0, 12))]
        net = flow.FlowNetwork(n, tuple(flow.Arc(u, v, c) for u, v, c in arcs), 0, n - 1)
        removed = [i for i in range(len(arcs)) if rng.random() < 0.2]
        cut_ok += flow.max_flow(net, to_mask(removed)) == brute_min_cut(n, arcs, 0, n - 1, removed)
    seconds = time.perf_counter() - t
    ok = not report.disagreements and cut_ok == 500 and seconds < 900
    verdict(capsys, 5, ok, f"{agreement(report)}, max flow equals min cut on {cut_ok}/500 networks, {seconds:.1f}s")


def test_criterion_06_spipuf(capsys):
    t = time.perf_counter()
    agree = 0
    sources = harness.family_ubik(KNAPSACK_SOURCES)
    for u in sources:
        inst, _ = paths.compile_ubik_to_spipuf(u)
        agree += paths.spipuf_decide(inst)[0] == ubik_decide(u)[0]
    seconds = time.perf_counter() - t
    verdict(capsys, 6, agree == len(sources) == 200 and seconds < 300, f"{agree}/{len(sources)} agree, {seconds:.1f}s")


def test_criterion_07_tepgfu(capsys):
    t = time.perf_counter()
    agree = solves = closed_ok = dual_ok = 0
    sources = harness.family_ubik(KNAPSACK_SOURCES)
    for u in sources:
        grid, _ = powergrid.compile_ubik_to_tepgfu(u)

        def inspect(attacked, result, grid=grid):
            nonlocal solves, closed_ok, dual_ok
            solves += 1
            closed_ok += result.total_shed == powergrid.star_shed_closed_form(grid, attacked)
            dual_ok += result.total_shed == result.dual_objective

        agree += powergrid.tepgfu_decide(grid, on_solve=inspect)[0] == ubik_decide(u)[0]
    seconds = time.perf_counter() - t
    ok = agree == len(sources) and closed_ok == dual_ok == solves and seconds < 900
    verdict(capsys, 7, ok, f"{agree}/{len(sources)} agree, closed form on {closed_ok}/{solves} solves, "
                           f"primal = dual on {dual_ok}/{solves}, {seconds:.1f}s")


def test_criterion_08_mcn(capsys):
    play = mcn.propagate(mcn.make_mcn(6, FIG3_EDGES, 1, 1, 1, 3), {2}, {1}, {0})
    play_ok = play.saved == {0, 2, 3}
    report = check_equivalence(MCN_FAMILY)
    compiled = sorted((compile_for("umcn", q)[0] for q in family_formulas(MCN_FAMILY)),
                      key=lambda inst: (inst.num_vertices, len(inst.edges)))
    same = 0
    for inst in compiled[:10]:
        with time_budget(600):
            same += mcn.umcn_decide(inst)[0] == mcn.umcn_decide(inst, prune=False)[0]
    ok = play_ok and not report.disagreements and not any(r.skipped for r in report.records) and same == 10
    verdict(capsys, 8, ok, f"worked play saves {sorted(play.saved)}, {agreement(report)}, "
                           f"pruned/unpruned agree on {same}/10 smallest")


def test_criterion_09_property_suites(capsys):
    failures = {}
    checked = 0
    sources = [("ubik", q) for spec in (UBIK_EXHAUSTIVE, UBIK_RANDOM) for q in family_formulas(spec)]
    sources += [("utik", q) for q in family_formulas(UTIK_FAMILY)]
    sources += [("umfipf", q) for q in family_formulas(FLOW_FAMILY)]
    sources += [("umcn", q) for q in family_formulas(MCN_FAMILY)]
    for game, q in sources:
        for prop in run_property_suite(game, compile_for(game, q)).properties:
            checked += 1
            if not prop.holds:
                failures[prop.name] = failures.get(prop.name, 0) + 1
    mutations = harness.run_mutations(20, seed=0)
    caught = sum(m.caught for m in mutations)
    ok = not failures and caught == 20
    verdict(capsys, 9, ok, f"{checked} property checks, failures by property {dict(sorted(failures.items()))}, "
                           f"{caught}/20 mutations caught")


def test_criterion_10_invariants(capsys):
    rng = random.Random(10)
    counts = dict.fromkeys(("knapsack", "arc removal", "mcn", "grid"), 0)
    violations = dict.fromkeys(counts, 0)

    def run(name, check, *args):
        counts[name] += 1
        try:
            check(*args)
        except AssertionError:
            violations[name] += 1

    for _ in range(500):
        pairs = [(rng.randint(1, 6), rng.randint(1, 6)) for _ in range(rng.randint(1, 5))]
        run("knapsack", invariants.check_knapsack_budgets, pairs, rng.randint(0, 30), rng.randint(1, 30),
            rng.randint(0, 3), rng.randint(0, 2), {rng.randint(0, 4) for _ in range(rng.randint(0, 3))},
            rng.randint(0, 4))

        n = rng.randint(2, 6)
        arcs = [(tuple(rng.sample(range(n), 2)), rng.randint(0, 9)) for _ in range(rng.randint(0, 10))]
        removed = {i for i in range(len(arcs)) if rng.random() < 0.3}
        run("arc removal", invariants.check_arc_removal, n, arcs, removed, rng.randint(0, max(len(arcs) - 1, 0)))

        n = rng.randint(1, 8)
        edges = sorted({tuple(sorted(rng.sample(range(n), 2))) for _ in range(rng.randint(0, 12))}) if n > 1 else []
        subsets = [{v for v in range(n) if rng.random() < 0.25} for _ in range(3)]
        run("mcn", invariants.check_mcn, n, edges, *subsets, rng.randint(0, n - 1))

        buses = rng.randint(2, 5)
        grid = invariants.radial_grid([rng.randint(0, 6) for _ in range(buses - 1)], rng.randint(0, 20),
                                      [(rng.randint(0, b - 1), rng.randint(0, 8), rng.randint(1, 3))
                                       for b in range(1, buses)])
        run("grid", invariants.check_grid_attack, grid, {l for l in range(buses - 1) if rng.random() < 0.4},
            rng.randint(0, buses - 2))

    ok = all(c >= 500 for c in counts.values()) and not any(violations.values())
    verdict(capsys, 10, ok, ", ".join(f"{k} {violations[k]} violations in {counts[k]}" for k in counts))
