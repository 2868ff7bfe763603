"""Correctness harness: reduction equivalence, property suites, figures, mutations.

Every compiled game is decided exactly and compared with the QBF oracle (or,
for the UBIK-sourced games, with the exact UBIK decider). Property suites
enumerate the structural claims behind each reduction at instance scale.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import asdict, dataclass, field

from . import flow, knapsack, knapsack_reduction, mcn, paths, powergrid
from .engine import (BudgetExceeded, Cardinality, LevelSpec, feasible_sets, mask_elements, time_budget,
                     to_mask)
from .errors import ShapeError
from .qbf import QbfInstance, Role, _restrict, enumerate_formulas, make_instance, qbf_decide, quantified_value, random_qbf

QBF_GAMES = ("ubik", "utik", "umik", "umfipf", "umcn")
UBIK_GAMES = ("spipuf", "tepgfu")

# game -> (number of blocks is free, matrix negated?)
_NEGATED = {"ubik": True, "utik": False, "umfipf": False, "umcn": False}


@dataclass
class FamilySpec:
    game: str
    block_sizes: tuple = ((1, 1),)         # candidate block-size vectors
    clauses: tuple = (1, 2)                # inclusive clause-count range
    count: int = 10
    seed: int = 0
    prune: bool = True
    exhaustive: bool = False
    record_only: bool = False
    deadline: float | None = None          # seconds per game solve
    items: tuple = (5, 5, 7)               # UBIK sources: max items, max weight, max profit

    def __post_init__(self):
        if self.game not in QBF_GAMES + UBIK_GAMES:
            raise ShapeError(f"unknown game {self.game!r}")
        if self.count < 0:
            raise ShapeError("count must be nonnegative")
        self.block_sizes = tuple(tuple(b) for b in self.block_sizes)
        self.clauses = tuple(self.clauses)


@dataclass
class InstanceRecord:
    id: int
    source: str
    expected: bool | None
    decided: bool | None
    agree: bool | None
    oracle_seconds: float
    game_seconds: float
    skipped: bool = False
    witness_ok: bool | None = None
    note: str = ""


@dataclass
class PropertyResult:
    name: str
    holds: bool
    checked: int
    counterexample: dict | None = None
    instance: str = ""


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)
    properties: list = field(default_factory=list)
    record_only: bool = False

    @property
    def disagreements(self) -> list:
        return [r for r in self.records if r.agree is False]

    @property
    def property_failures(self) -> list:
        return [p for p in self.properties if not p.holds]

    @property
    def ok(self) -> bool:
        if self.property_failures:
            return False
        return self.record_only or not self.disagreements

    def summary(self) -> dict:
        return {
            "instances": len(self.records),
            "agreed": sum(1 for r in self.records if r.agree),
            "disagreed": len(self.disagreements),
            "skipped": sum(1 for r in self.records if r.skipped),
            "record_only": self.record_only,
            "properties_checked": len(self.properties),
            "properties_failed": len(self.property_failures),
            "ok": self.ok,
        }

    def to_json(self) -> dict:
        return {
            "summary": self.summary(),
            "records": [asdict(r) for r in sorted(self.records, key=lambda r: r.id)],
            "properties": [asdict(p) for p in self.properties],
        }

    def text(self) -> str:
        s = self.summary()
        lines = [f"instances {s['instances']}: agreed {s['agreed']}, disagreed {s['disagreed']}, "
                 f"skipped {s['skipped']}" + (" (record only)" if self.record_only else "")]
        for r in sorted(self.records, key=lambda r: r.id):
            if r.agree is False:
                lines.append(f"  #{r.id} oracle={r.expected} game={r.decided}  {r.source}")
        for p in self.properties:
            if not p.holds:
                lines.append(f"  property {p.name} fails on {p.instance}: {p.counterexample}")
        lines.append(f"properties: {s['properties_checked'] - s['properties_failed']}/"
                     f"{s['properties_checked']} hold")
        lines.append("OK" if self.ok else "FAILED")
        return "\n".join(lines) + "\n"


# -- family generation -------------------------------------------------------------

def family_formulas(spec: FamilySpec) -> list[QbfInstance]:
    negated = _NEGATED.get(spec.game)
    lo, hi = spec.clauses
    if spec.exhaustive:
        out = []
        for sizes in spec.block_sizes:
            neg = negated if negated is not None else len(sizes) % 2 == 0
            out.extend(enumerate_formulas(sizes, hi, neg, min_clauses=lo))
        return out
    out = []
    for i in range(spec.count):
        rng = random.Random(f"{spec.game}:{spec.seed}:{i}")
        sizes = rng.choice(spec.block_sizes)
        neg = negated if negated is not None else len(sizes) % 2 == 0
        out.append(random_qbf(rng.randrange(2 ** 32), sizes, rng.randint(lo, hi), neg))
    return out


def family_ubik(spec: FamilySpec) -> list[knapsack.UmikInstance]:
    max_n, max_w, max_p = spec.items
    out = []
    for i in range(spec.count):
        rng = random.Random(f"{spec.game}:{spec.seed}:{i}")
        n = rng.randint(1, max_n)
        pairs = [(rng.randint(1, max_w), rng.randint(1, max_p)) for _ in range(n)]
        cap = rng.randint(1, sum(w for w, _ in pairs))
        goal = rng.randint(1, sum(p for _, p in pairs))
        out.append(knapsack.make_umik(pairs, cap, goal, [rng.randint(1, n)]))
    return out


def compile_for(game: str, q: QbfInstance):
    if game == "ubik":
        return knapsack_reduction.compile_b2_to_ubik(q)
    if game == "utik":
        return knapsack_reduction.compile_b3_to_utik(q)
    if game == "umik":
        return knapsack_reduction.compile_qbf_to_umik(q)
    if game == "umfipf":
        return flow.compile_b2sat_to_umfipf(q)
    if game == "umcn":
        return mcn.compile_b3sat_to_umcn(q)
    raise ShapeError(f"{game} is not compiled from a formula")


def decide_compiled(game: str, artifact, prune: bool = True):
    if game == "ubik":
        return knapsack.ubik_decide(artifact.instance, prune)
    if game == "utik":
        return knapsack.utik_decide(artifact.instance, prune)
    if game == "umik":
        return knapsack.umik_decide(artifact.instance, prune)
    if game == "umfipf":
        return flow.umfipf_decide(artifact[0], prune)
    if game == "umcn":
        return mcn.umcn_decide(artifact[0], prune)
    if game == "spipuf":
        return paths.spipuf_decide(artifact[0], prune)
    if game == "tepgfu":
        return powergrid.tepgfu_decide(artifact[0], prune)
    raise ShapeError(f"unknown game {game!r}")


# -- witness replay ----------------------------------------------------------------

def witness_assignment(game: str, artifact, witness):
    """Map a top-level witness to an X assignment, or None if it does not follow the pattern."""
    if game in ("ubik", "utik", "umik"):
        q = artifact.source
        xs = q.blocks[0].vars
        chosen = {artifact.provenance[i] for i in witness}
        bits = []
        for x in xs:
            pos, neg = ("i_pos", x) in chosen, ("i_neg", x) in chosen
            if pos == neg:
                return None
            bits.append(pos)
        extra = [i for i in witness if artifact.provenance[i][0] not in ("i_pos", "i_neg")
                 or artifact.provenance[i][1] not in xs]
        if extra:
            return None
        # an attacking top round leaves the follower the complementary item,
        # so interdicting i_~x is what makes x true
        attacking = artifact.instance.m % 2 == 1
        return {x: b != attacking for x, b in zip(xs, bits)}
    if game == "umfipf":
        inst, prov = artifact
        roles = [prov.arc_roles[a] for a in witness]
        if any(r != "x_source" for r, _ in roles):
            return None
        keys = {k for _, k in roles}
        xs = sorted({k[0] for r, k in prov.arc_roles if r == "x_source"})
        bits = []
        for x in xs:
            pos, neg = (x, False) in keys, (x, True) in keys
            if pos == neg:
                return None
            bits.append(pos)
        return dict(zip(xs, bits))
    if game == "umcn":
        inst, prov = artifact
        xs = prov.blocks[0]
        by_vertex = {v: k for k, v in prov.literal_vertex.items()}
        picked = [by_vertex.get(v) for v in witness]
        if any(p is None or p[0] not in xs for p in picked):
            return None
        bits = []
        for x in xs:
            pos, neg = (x, False) in picked, (x, True) in picked
            if pos == neg:
                return None
            bits.append(pos)
        return dict(zip(xs, bits))
    return None


def assignment_wins(q: QbfInstance, fixed: dict) -> bool:
    matrix = _restrict(q.matrix, fixed)
    if matrix is None:
        return q.matrix_negated
    rest = [(b.role, b.vars) for b in q.blocks[1:]]
    return quantified_value(rest, matrix, q.matrix_negated)


# -- equivalence -------------------------------------------------------------------

def _solve(spec, game, artifact):
    """(decision, witness, seconds, skipped)."""
    t = time.perf_counter()
    try:
        with time_budget(spec.deadline):
            decision, witness = decide_compiled(game, artifact, spec.prune)
    except BudgetExceeded:
        return None, None, time.perf_counter() - t, True
    return decision, witness, time.perf_counter() - t, False


def check_equivalence(spec: FamilySpec) -> VerificationReport:
    report = VerificationReport(record_only=spec.record_only)
    if spec.game in UBIK_GAMES:
        for idx, u in enumerate(family_ubik(spec)):
            t = time.perf_counter()
            expected = knapsack.ubik_decide(u)[0]
            t_oracle = time.perf_counter() - t
            if spec.game == "spipuf":
                artifact = paths.compile_ubik_to_spipuf(u)
            else:
                artifact = powergrid.compile_ubik_to_tepgfu(u)
            decided, _, secs, skipped = _solve(spec, spec.game, artifact)
            report.records.append(InstanceRecord(
                idx, json.dumps(knapsack.umik_to_json(u), sort_keys=True), expected, decided,
                None if skipped else decided == expected, t_oracle, secs, skipped))
        return report
    for idx, q in enumerate(family_formulas(spec)):
        t = time.perf_counter()
        expected = qbf_decide(q)
        t_oracle = time.perf_counter() - t
        try:
            artifact = compile_for(spec.game, q)
        except ShapeError as exc:
            if not spec.record_only:
                raise
            report.records.append(InstanceRecord(idx, str(q), expected, None, None, t_oracle, 0.0,
                                                 True, note=f"not compiled: {exc}"))
            continue
        decided, witness, secs, skipped = _solve(spec, spec.game, artifact)
        rec = InstanceRecord(idx, str(q), expected, decided, None if skipped else decided == expected,
                             t_oracle, secs, skipped)
        if skipped:
            rec.note = "deadline exceeded"
        elif decided and expected and witness is not None:
            fixed = witness_assignment(spec.game, artifact, witness)
            rec.witness_ok = fixed is not None and assignment_wins(q, fixed)
        report.records.append(rec)
    return report


# -- property suites ---------------------------------------------------------------

def _pairs(art, role_filter_vars):
    """For each variable: (index of i_x, index of i_~x)."""
    return {v: (art.items_with("i_pos", v)[0], art.items_with("i_neg", v)[0]) for v in role_filter_vars}


def _one_per_pair(mask: int, pairs) -> bool:
    return all((mask >> a & 1) + (mask >> b & 1) == 1 for a, b in pairs)


def _ubik_properties(art) -> list[PropertyResult]:
    inst = art.instance
    q = art.source
    xs, ys = q.blocks[0].vars, q.blocks[1].vars
    oracle = knapsack.KnapsackOracle(inst.items, inst.capacity)
    xpairs = list(_pairs(art, xs).values())
    ypairs = list(_pairs(art, ys).values())
    x_items = to_mask(i for p in xpairs for i in p)
    jprimes = [art.items_with("j_prime", x)[0] for x in xs]
    attack = LevelSpec(Role.EXISTS, inst.n, Cardinality(inst.budget(2)))
    p1 = PropertyResult("ubik-1", True, 0, instance=str(q))
    p2 = PropertyResult("ubik-2", True, 0, instance=str(q))
    for a in feasible_sets(attack):
        pattern = _one_per_pair(a & x_items, xpairs) and not a & ~x_items
        if not pattern:
            p1.checked += 1
            if p1.holds and oracle.max_profit(a) < inst.goal:
                p1.holds = False
                p1.counterexample = {"attack": mask_elements(a)}
            continue
        p2.checked += 1
        if not p2.holds:
            continue
        bad = None
        for i in mask_elements(x_items & ~a) + jprimes:
            if oracle.max_profit(a | 1 << i) >= inst.goal:
                bad = {"attack": mask_elements(a), "missing": i}
                break
        for yi, ny in ypairs:
            if bad:
                break
            if oracle.max_profit(a | 1 << yi | 1 << ny) >= inst.goal:
                bad = {"attack": mask_elements(a), "neither": [yi, ny]}
            elif oracle.max_profit_with(1 << yi | 1 << ny, a) >= inst.goal:
                bad = {"attack": mask_elements(a), "both": [yi, ny]}
        if bad:
            p2.holds, p2.counterexample = False, bad
    return [p1, p2]


def _utik_properties(art) -> list[PropertyResult]:
    inst = art.instance
    q = art.source
    xs, ys, zs = (b.vars for b in q.blocks)
    oracle = knapsack.KnapsackOracle(inst.items, inst.capacity)
    xpairs = list(_pairs(art, xs).values())
    ypairs = list(_pairs(art, ys).values())
    zpairs = list(_pairs(art, zs).values())
    x_items = to_mask(i for p in xpairs for i in p)
    y_items = to_mask(i for p in ypairs for i in p)
    jprimes = [art.items_with("j_prime", y)[0] for y in ys]
    fortify = LevelSpec(Role.EXISTS, inst.n, Cardinality(inst.budget(3)))
    attack = LevelSpec(Role.FORALL, inst.n, Cardinality(inst.budget(2)), excludes=(0,))
    p3 = PropertyResult("utik-3", True, 0, instance=str(q))
    p4 = PropertyResult("utik-4", True, 0, instance=str(q))
    p5 = PropertyResult("utik-5", True, 0, instance=str(q))
    for f in feasible_sets(fortify):
        pattern_f = _one_per_pair(f & x_items, xpairs) and not f & ~x_items
        if not pattern_f:
            p3.checked += 1
            if p3.holds and all(oracle.max_profit(a) >= inst.goal for a in feasible_sets(attack, (f,))):
                p3.holds = False
                p3.counterexample = {"fortified": mask_elements(f)}
            continue
        for a in feasible_sets(attack, (f,)):
            pattern_a = _one_per_pair(a & y_items, ypairs) and not a & ~y_items
            if not pattern_a:
                p4.checked += 1
                if p4.holds and oracle.max_profit(a) < inst.goal:
                    p4.holds = False
                    p4.counterexample = {"fortified": mask_elements(f), "attack": mask_elements(a)}
                continue
            p5.checked += 1
            if not p5.holds:
                continue
            bad = None
            must = mask_elements(f) + mask_elements(y_items & ~a) + jprimes
            for i in must:
                if oracle.max_profit(a | 1 << i) >= inst.goal:
                    bad = {"missing": i}
                    break
            if bad is None:
                # the follower may not add an X item beyond the fortified ones
                for i in mask_elements(x_items & ~f & ~a):
                    if oracle.max_profit_with(1 << i, a) >= inst.goal:
                        bad = {"unfortified_x": i}
                        break
            for zi, nz in zpairs:
                if bad:
                    break
                if oracle.max_profit(a | 1 << zi | 1 << nz) >= inst.goal:
                    bad = {"neither": [zi, nz]}
                elif oracle.max_profit_with(1 << zi | 1 << nz, a) >= inst.goal:
                    bad = {"both": [zi, nz]}
            if bad:
                bad.update(fortified=mask_elements(f), attack=mask_elements(a))
                p5.holds, p5.counterexample = False, bad
    return [p3, p4, p5]


def _flow_properties(artifact) -> list[PropertyResult]:
    inst, prov = artifact
    search = flow.AttackSearch(inst)
    xs = sorted({k[0] for r, k in prov.arc_roles if r == "x_source"})
    ys = sorted({k[0] for r, k in prov.arc_roles if r == "y_source"})
    xpair = [(prov.arcs_with("x_source", (x, False))[0], prov.arcs_with("x_source", (x, True))[0]) for x in xs]
    ypair = [(prov.arcs_with("y_source", (y, False))[0], prov.arcs_with("y_source", (y, True))[0]) for y in ys]
    x_arcs = to_mask(a for p in xpair for a in p)
    y_arcs = to_mask(a for p in ypair for a in p)
    fortify = LevelSpec(Role.EXISTS, len(inst.network.arcs), Cardinality(inst.fortify_budget))
    p6 = PropertyResult("flow-6", True, 0)
    p7 = PropertyResult("flow-7", True, 0)
    for f in feasible_sets(fortify):
        if not (_one_per_pair(f & x_arcs, xpair) and not f & ~x_arcs):
            p6.checked += 1
            if p6.holds and search.find(f) is None:
                p6.holds = False
                p6.counterexample = {"fortified": mask_elements(f)}
            continue
        expected_x = x_arcs & ~f

        def off_pattern(a, expected_x=expected_x):
            return not (a & x_arcs == expected_x and _one_per_pair(a & y_arcs, ypair)
                        and not a & ~(x_arcs | y_arcs))

        p7.checked += 1
        found = search.find(f, accept=off_pattern)
        if p7.holds and found is not None:
            p7.holds = False
            p7.counterexample = {"fortified": mask_elements(f), "attack": mask_elements(found)}
    return [p6, p7]


def _mcn_properties(artifact) -> list[PropertyResult]:
    inst, prov = artifact
    xs, ys, zs = prov.blocks
    lit = prov.literal_vertex
    oracle = mcn.ProtectionOracle(inst)
    full = (1 << inst.num_vertices) - 1

    def pairs(vs):
        return [(lit[(v, False)], lit[(v, True)]) for v in vs]

    xpair, ypair, zpair = pairs(xs), pairs(ys), pairs(zs)
    x_vertices = to_mask(v for p in xpair for v in p)
    y_vertices = to_mask(v for p in ypair for v in p)
    vaccinate = LevelSpec(Role.EXISTS, inst.num_vertices, Cardinality(inst.vaccinate_budget))
    infect = LevelSpec(Role.FORALL, inst.num_vertices, Cardinality(inst.infect_budget), excludes=(0,))
    protect_spec = Cardinality(inst.protect_budget)
    p8 = PropertyResult("mcn-8", True, 0)
    p9 = PropertyResult("mcn-9", True, 0)
    p10 = PropertyResult("mcn-10", True, 0)
    for d in feasible_sets(vaccinate):
        if not (_one_per_pair(d & x_vertices, xpair) and not d & ~x_vertices):
            p8.checked += 1
            if p8.holds and all(oracle.reaches(d, i, inst.goal) for i in feasible_sets(infect, (d,))):
                p8.holds = False
                p8.counterexample = {"vaccinated": mask_elements(d)}
            continue
        for i in feasible_sets(infect, (d,)):
            if not _one_per_pair(i & y_vertices, ypair):
                p9.checked += 1
                if p9.holds and not oracle.reaches(d, i, inst.goal):
                    p9.holds = False
                    p9.counterexample = {"vaccinated": mask_elements(d), "infected": mask_elements(i)}
                continue
            p10.checked += 1
            if not p10.holds:
                continue
            need_y = y_vertices & ~i
            protect = LevelSpec(Role.EXISTS, inst.num_vertices, protect_spec, eligible=full & ~i)
            for p in feasible_sets(protect):
                if oracle.saved_after(d, i, p) < inst.goal:
                    continue
                if p & need_y != need_y or not _one_per_pair(p, zpair):
                    p10.holds = False
                    p10.counterexample = {"vaccinated": mask_elements(d), "infected": mask_elements(i),
                                          "protected": mask_elements(p)}
                    break
    return [p8, p9, p10]


def run_property_suite(game: str, artifact) -> VerificationReport:
    """Enumerate the structural claims of the matching reduction on one compiled artifact."""
    report = VerificationReport()
    if game == "ubik":
        if not isinstance(artifact, knapsack_reduction.CompiledArtifact) or artifact.kind != "ubik":
            raise ShapeError("ubik properties need a compiled UBIK artifact")
        report.properties = _ubik_properties(artifact)
    elif game == "utik":
        if not isinstance(artifact, knapsack_reduction.CompiledArtifact) or artifact.kind != "utik":
            raise ShapeError("utik properties need a compiled UTIK artifact")
        report.properties = _utik_properties(artifact)
    elif game == "umfipf":
        if not (isinstance(artifact, tuple) and isinstance(artifact[1], flow.FlowProvenance)):
            raise ShapeError("flow properties need (MfipfInstance, FlowProvenance)")
        report.properties = _flow_properties(artifact)
    elif game == "umcn":
        if not (isinstance(artifact, tuple) and isinstance(artifact[1], mcn.McnProvenance)):
            raise ShapeError("mcn properties need (McnInstance, McnProvenance)")
        report.properties = _mcn_properties(artifact)
        for p in report.properties:
            p.instance = ""
    else:
        raise ShapeError(f"no property suite for {game!r}")
    return report


# -- figures ---------------------------------------------------------------------

FIGURE1_FORMULA = ([2, 2], [[1, 2, -3], [-1, -2, 4], [1, 2, 3]], True)
FIGURE2_FORMULA = ([1, 1, 2], [[1, 2, -3], [-1, -2, 4], [1, 3, 2]], False)


def figure_artifacts():
    q1 = make_instance(*FIGURE1_FORMULA)
    q2 = make_instance(*FIGURE2_FORMULA)
    return knapsack_reduction.compile_b2_to_ubik(q1), knapsack_reduction.compile_b3_to_utik(q2)


def regenerate_figures() -> dict:
    """Digit tables of the two worked knapsack examples (variables named a, b, c, d)."""
    a1, a2 = figure_artifacts()
    return {"figure1": knapsack_reduction.render_table(a1, "abcd"),
            "figure2": knapsack_reduction.render_table(a2, "abcd")}


# -- structural audits and mutations -------------------------------------------------

def audit_knapsack(art) -> list[str]:
    """Check digit rules of a compiled knapsack artifact against its formula.

    Returns a list of violated rules (empty when the artifact is sound).
    """
    q, inst, lay = art.source, art.instance, art.layout
    problems = []
    if not knapsack_reduction.no_carry(art):
        problems.append("column sums carry")
    sizes = [len(b.vars) for b in q.blocks]
    if art.kind == "ubik":
        want_budgets = (sizes[0],)
        want_goal_high = sizes[0]
        profit_high = {0: 1, 1: 0}
    else:
        want_budgets = (sizes[1], sizes[0])
        want_goal_high = (sizes[1] + 1) * sizes[0] + sizes[1]
        profit_high = {0: sizes[1] + 1, 1: 1, 2: 0}
    if inst.level_budgets != want_budgets:
        problems.append(f"budgets {inst.level_budgets} != {want_budgets}")
    w_high, w_digits = lay.split(inst.capacity)
    k_high, k_digits = lay.split(inst.goal)
    cols = lay.columns([f"v{v}" for v in range(q.num_vars)])[1:]
    doubled = {v for v, pos in enumerate(lay.var_positions) if len(pos) == 2}
    for name, wd, kd in zip(cols, w_digits, k_digits):
        if name.startswith("c"):
            ok_w, ok_k = wd == 4, kd == 4
        elif name.endswith("^"):
            ok_w, ok_k = wd == 2, kd == 1
        elif name.endswith("_"):
            ok_w, ok_k = wd == 0, kd == 1
        else:
            ok_w, ok_k = wd == 1, kd == 1
        if not ok_w:
            problems.append(f"W digit {wd} in column {name}")
        if not ok_k:
            problems.append(f"K digit {kd} in column {name}")
    if w_high != 0:
        problems.append("W has a nonzero high block")
    if k_high != want_goal_high:
        problems.append(f"K high block {k_high} != {want_goal_high}")
    for i, ((role, idx), it) in enumerate(zip(art.provenance, inst.items)):
        wh, wd = lay.split(it.weight)
        ph, pd = lay.split(it.profit)
        if role in ("i_pos", "i_neg"):
            var_cols = [c for c, d in zip(cols, wd) if d and not c.startswith("c")]
            if var_cols != [f"v{idx}^" if idx in doubled else f"v{idx}"] or wd != pd:
                problems.append(f"item {i} digits do not match its literal")
            for k, clause in enumerate(q.matrix):
                want = 1 if clause.contains(idx, role == "i_neg") else 0
                if wd[cols.index(f"c{k + 1}")] != want:
                    problems.append(f"item {i} clause digit c{k + 1}")
            if wh != 0:
                problems.append(f"item {i} weight has a high block")
            if ph != profit_high[q.variable_block(idx)]:
                problems.append(f"item {i} profit high block {ph}")
        elif role.startswith("clause"):
            unit = 1 if role == "clause_1" else 2
            if it.weight != it.profit or it.weight != unit * 10 ** lay.clause_position(idx):
                problems.append(f"clause item {i} value")
        elif role == "j":
            hi = lay.var_positions[idx][0]
            if it.weight != it.profit or it.weight != 2 * 10 ** hi:
                problems.append(f"j item {i} value")
        elif role == "j_prime":
            hi, lo = lay.var_positions[idx]
            if it.weight != 10 ** hi or it.profit != 10 ** lo:
                problems.append(f"j' item {i} value")
    return problems


def audit_mcn(artifact) -> list[str]:
    inst, prov = artifact
    xs, ys, zs = prov.blocks
    n_clauses = len({lab.split("#")[0] for lab in prov.labels if lab.startswith("clause")})
    k = mcn.gadget_sizes(len(xs), len(ys), len(zs), n_clauses)
    problems = []
    if inst.goal != k["goal"]:
        problems.append(f"goal {inst.goal} != {k['goal']}")
    want = (len(xs), len(xs) + len(ys), len(ys) + len(zs))
    got = (inst.vaccinate_budget, inst.infect_budget, inst.protect_budget)
    if got != want:
        problems.append(f"budgets {got} != {want}")
    groups: dict = {}
    for lab in prov.labels:
        if "#" in lab and not lab.startswith("clause"):
            groups.setdefault(lab.split("#")[0], 0)
            groups[lab.split("#")[0]] += 1
    xnames = {f"x{v}" for v in xs}
    for name, size in groups.items():
        if name.startswith("C["):
            first = name[2:].split(",")[0].lstrip("~")
            expect = k["gamma_x"] if first in xnames else k["gamma_z"]
        else:
            expect = k["gamma_y"]
        if size != expect:
            problems.append(f"gadget {name} has {size} vertices, expected {expect}")
    degree = [0] * inst.num_vertices
    for u, v in inst.edges:
        degree[u] += 1
        degree[v] += 1
    for v, lab in enumerate(prov.labels):
        want_deg = 1 if lab.startswith("S[") else 2 if lab.startswith(("C[", "K[")) else None
        if want_deg is not None and degree[v] != want_deg:
            problems.append(f"vertex {lab} has degree {degree[v]}")
    return problems


@dataclass
class MutationResult:
    id: int
    target: str
    description: str
    caught_by: list

    @property
    def caught(self) -> bool:
        return bool(self.caught_by)


_MUTATION_KINDS = ("ubik_capacity", "ubik_goal", "ubik_item", "ubik_budget",
                   "utik_capacity", "utik_budget", "umcn_gamma", "umcn_goal", "umcn_budget")


def _bump_digit(value: int, pos: int, rng) -> int:
    digit = (value // 10 ** pos) % 10
    delta = 1 if digit == 0 or (digit < 9 and rng.random() < 0.5) else -1
    return value + delta * 10 ** pos


def _mutate(kind: str, rng):
    """Return (game, clean artifact, mutated artifact, description)."""
    a1, a2 = figure_artifacts()
    if kind.startswith(("ubik", "utik")):
        art = a1 if kind.startswith("ubik") else a2
        inst = art.instance
        if kind.endswith("capacity") or kind.endswith("goal"):
            attr = "capacity" if kind.endswith("capacity") else "goal"
            pos = rng.randrange(art.layout.M - 1)
            new = _bump_digit(getattr(inst, attr), pos, rng)
            mutated = knapsack.UmikInstance(inst.items, new if attr == "capacity" else inst.capacity,
                                            new if attr == "goal" else inst.goal, inst.level_budgets)
            desc = f"{attr} digit at position {pos}"
        elif kind.endswith("item"):
            i = rng.randrange(inst.n)
            pos = rng.randrange(art.layout.M - 1)
            it = inst.items[i]
            if rng.random() < 0.5:
                it = knapsack.KnapsackItem(max(1, _bump_digit(it.weight, pos, rng)), it.profit)
                desc = f"item {i} weight digit {pos}"
            else:
                it = knapsack.KnapsackItem(it.weight, max(1, _bump_digit(it.profit, pos, rng)))
                desc = f"item {i} profit digit {pos}"
            items = inst.items[:i] + (it,) + inst.items[i + 1:]
            mutated = knapsack.UmikInstance(items, inst.capacity, inst.goal, inst.level_budgets)
        else:
            level = rng.randrange(inst.m)
            budgets = list(inst.level_budgets)
            budgets[level] += 1 if budgets[level] == 0 or rng.random() < 0.5 else -1
            mutated = inst.with_budgets(budgets)
            desc = f"budget of round {level + 2} -> {budgets[level]}"
        clean = art
        bad = knapsack_reduction.CompiledArtifact(mutated, art.layout, art.provenance, art.source, art.kind)
        return art.kind, clean, bad, desc
    q = make_instance([2, 1, 1], [[1, 3, 4], [-2, -3, 4]], False)
    inst, prov = mcn.compile_b3sat_to_umcn(q)
    if kind == "umcn_gamma":
        gadget = [v for v, lab in enumerate(prov.labels) if "#" in lab and not lab.startswith("clause")]
        drop = rng.choice(gadget)
        keep = [v for v in range(inst.num_vertices) if v != drop]
        index = {v: k for k, v in enumerate(keep)}
        edges = tuple((index[u], index[v]) for u, v in inst.edges if drop not in (u, v))
        bad_inst = mcn.McnInstance(len(keep), edges, inst.vaccinate_budget, inst.infect_budget,
                                   inst.protect_budget, inst.goal)
        lit = {k: index[v] for k, v in prov.literal_vertex.items()}
        bad_prov = mcn.McnProvenance(tuple(prov.labels[v] for v in keep), lit, prov.constants, prov.blocks)
        desc = f"gadget {prov.labels[drop].split('#')[0]} loses one vertex"
        return "umcn", (inst, prov), (bad_inst, bad_prov), desc
    if kind == "umcn_goal":
        delta = rng.choice((-1, 1))
        bad_inst = mcn.McnInstance(inst.num_vertices, inst.edges, inst.vaccinate_budget, inst.infect_budget,
                                   inst.protect_budget, inst.goal + delta)
        return "umcn", (inst, prov), (bad_inst, prov), f"goal {delta:+d}"
    budgets = [inst.vaccinate_budget, inst.infect_budget, inst.protect_budget]
    which = rng.randrange(3)
    budgets[which] += rng.choice((-1, 1))
    bad_inst = mcn.McnInstance(inst.num_vertices, inst.edges, *budgets, inst.goal)
    return "umcn", (inst, prov), (bad_inst, prov), f"budget {('omega', 'phi', 'lambda')[which]} -> {budgets[which]}"


def _semantic_checks(game, artifact, source):
    """Decision against the oracle plus property verdicts."""
    out = {}
    if game in ("ubik", "utik"):
        decided = decide_compiled(game, artifact)[0]
        out["equivalence"] = decided == qbf_decide(source)
    else:
        # the critical node instance is too large for the full decider; check the
        # pattern vaccinations the reduction maps to X assignments instead
        inst, prov = artifact
        oracle = mcn.ProtectionOracle(inst)
        xs = prov.blocks[0]
        ok = True
        for bits in itertools.product((False, True), repeat=len(xs)):
            d = to_mask(prov.literal_vertex[(x, not b)] for x, b in zip(xs, bits))
            infect = LevelSpec(Role.FORALL, inst.num_vertices, Cardinality(inst.infect_budget),
                               eligible=((1 << inst.num_vertices) - 1) & ~d)
            holds = all(oracle.reaches(d, i, inst.goal) for i in feasible_sets(infect))
            if holds != assignment_wins(source, dict(zip(xs, bits))):
                ok = False
                break
        out["equivalence"] = ok
        return out
    for p in run_property_suite(game, artifact).properties:
        out[p.name] = p.holds
    return out


def run_mutations(count: int = 20, seed: int = 0, semantic: bool = True) -> list[MutationResult]:
    """Apply `count` seeded single-parameter mutations and record which checks notice each one."""
    results = []
    baseline: dict = {}
    for k in range(count):
        rng = random.Random(f"mutation:{seed}:{k}")
        kind = _MUTATION_KINDS[k % len(_MUTATION_KINDS)]
        game, clean, bad, desc = _mutate(kind, rng)
        caught = []
        audit = audit_knapsack if game in ("ubik", "utik") else audit_mcn
        if audit(bad):
            caught.append("audit")
        if semantic:
            source = clean.source if game in ("ubik", "utik") else None
            if source is None:
                source = make_instance([2, 1, 1], [[1, 3, 4], [-2, -3, 4]], False)
            if game not in baseline:
                baseline[game] = _semantic_checks(game, clean, source)
            after = _semantic_checks(game, bad, source)
            for name, value in after.items():
                if baseline[game].get(name) and not value:
                    caught.append(name)
        results.append(MutationResult(k, kind, desc, caught))
    return results
