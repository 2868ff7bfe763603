"""Multi-level critical node game with unit weights.

The defender vaccinates D, the attacker infects I outside D, the defender
protects P outside I; infection then spreads along edges to every vertex
that is neither vaccinated nor protected. The defender wants many saved
vertices.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import comb

from .engine import Cardinality, LevelSpec, check_deadline, decide_alternating, mask_elements, to_mask
from .errors import ParseError, ShapeError, SizeLimitError
from .qbf import QbfInstance, Role

MAX_VERTICES_FULL = 26
MAX_VERTICES_PRUNED = 40

VACCINATED = "vaccinated"
PROTECTED = "protected"
DIRECTLY_INFECTED = "directly-infected"
INDIRECTLY_INFECTED = "indirectly-infected"
SAVED = "saved"


@dataclass(frozen=True)
class McnInstance:
    num_vertices: int
    edges: tuple
    vaccinate_budget: int
    infect_budget: int
    protect_budget: int
    goal: int

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ShapeError(f"self-loop at vertex {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ShapeError(f"edge ({u}, {v}) leaves the vertex range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ShapeError(f"duplicate edge {key}")
            seen.add(key)
        if min(self.vaccinate_budget, self.infect_budget, self.protect_budget) < 0:
            raise ShapeError("budgets must be nonnegative")

    def adjacency(self) -> list[int]:
        adj = [0] * self.num_vertices
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj


@dataclass(frozen=True)
class PlayOutcome:
    saved: frozenset
    infected: frozenset
    states: tuple

    @property
    def saved_count(self) -> int:
        return len(self.saved)


def make_mcn(n, edges, omega, phi, lam, goal) -> McnInstance:
    return McnInstance(n, tuple((int(u), int(v)) for u, v in edges), omega, phi, lam, goal)


def infection_closure(adj: list[int], sources: int, blocked: int) -> int:
    """Bitmask of vertices reached from `sources` through vertices outside `blocked`."""
    infected = sources
    frontier = sources
    while frontier:
        reach = 0
        while frontier:
            low = frontier & -frontier
            reach |= adj[low.bit_length() - 1]
            frontier ^= low
        frontier = reach & ~blocked & ~infected
        infected |= frontier
    return infected


def propagate(inst: McnInstance, vaccinated, infected, protected) -> PlayOutcome:
    """Play one (D, I, P) line and report who ends up saved."""
    d, i, p = to_mask(vaccinated), to_mask(infected), to_mask(protected)
    if d & i:
        raise ShapeError("infected vertices must not be vaccinated")
    if p & i:
        raise ShapeError("protected vertices must not be directly infected")
    full = (1 << inst.num_vertices) - 1
    if (d | i | p) & ~full:
        raise ShapeError("vertex out of range")
    reached = infection_closure(inst.adjacency(), i, d | p)
    states = []
    for v in range(inst.num_vertices):
        bit = 1 << v
        if d & bit:
            states.append(VACCINATED)
        elif i & bit:
            states.append(DIRECTLY_INFECTED)
        elif p & bit:
            states.append(PROTECTED)
        elif reached & bit:
            states.append(INDIRECTLY_INFECTED)
        else:
            states.append(SAVED)
    return PlayOutcome(frozenset(mask_elements(full & ~reached)), frozenset(mask_elements(reached)),
                       tuple(states))


class ProtectionOracle:
    """Best protection answer for fixed vaccination and infection masks."""

    def __init__(self, inst: McnInstance, prune: bool = True):
        self.inst = inst
        self.adj = inst.adjacency()
        self.prune = prune
        self.n = inst.num_vertices

    def saved_after(self, vaccinated: int, infected: int, protected: int) -> int:
        return self.n - bin(infection_closure(self.adj, infected, vaccinated | protected)).count("1")

    def best(self, vaccinated: int, infected: int):
        """(max saved count, one optimal protection mask), by exhaustive search."""
        candidates = mask_elements(((1 << self.n) - 1) & ~infected)
        best_count, best_mask = -1, 0
        for r in range(min(self.inst.protect_budget, len(candidates)) + 1):
            for combo in itertools.combinations(candidates, r):
                p = to_mask(combo)
                count = self.saved_after(vaccinated, infected, p)
                if count > best_count:
                    best_count, best_mask = count, p
        return best_count, best_mask

    def reaches(self, vaccinated: int, infected: int, goal: int) -> bool:
        """Is there a protection set saving at least `goal` vertices?"""
        if not self.prune:
            return self.best(vaccinated, infected)[0] >= goal
        failed = set()

        def search(protected, left):
            reached = infection_closure(self.adj, infected, vaccinated | protected)
            if self.n - bin(reached).count("1") >= goal:
                return True
            if left == 0 or protected in failed:
                return False
            check_deadline()
            # protecting a vertex the infection never reaches changes nothing
            for v in mask_elements(reached & ~infected):
                if search(protected | 1 << v, left - 1):
                    return True
            failed.add(protected)
            return False

        return search(0, self.inst.protect_budget)


def umcn_levels(inst: McnInstance) -> list[LevelSpec]:
    n = inst.num_vertices
    return [
        LevelSpec(Role.EXISTS, n, Cardinality(inst.vaccinate_budget), group="vaccinate"),
        LevelSpec(Role.FORALL, n, Cardinality(inst.infect_budget), excludes=(0,), group="infect"),
    ]


def umcn_decide(inst: McnInstance, prune: bool = True):
    """Does some vaccination keep at least `goal` vertices savable against every attack?"""
    limit = MAX_VERTICES_PRUNED if prune else MAX_VERTICES_FULL
    if inst.num_vertices > limit:
        raise SizeLimitError(f"{inst.num_vertices} vertices exceed the limit of {limit}")
    oracle = ProtectionOracle(inst, prune)
    return decide_alternating(umcn_levels(inst),
                              lambda s: oracle.reaches(s[0], s[1], inst.goal), prune=prune)


# -- reduction -------------------------------------------------------------------

@dataclass(frozen=True)
class McnProvenance:
    labels: tuple            # one label per vertex
    literal_vertex: dict     # (var, negated) -> vertex
    constants: dict
    blocks: tuple = ()       # variables of X, Y, Z

    def vertices_of(self, prefix: str) -> list[int]:
        return [v for v, name in enumerate(self.labels) if name.startswith(prefix)]


def gadget_sizes(n_x: int, n_y: int, n_z: int, n_clauses: int) -> dict:
    gz = n_clauses + 1
    gy = gz * comb(n_z, 2) + 1
    gx = 4 * n_y * gy + 1
    goal = gx * comb(n_x, 2) + n_x + n_y * (gy + 1) + gz * comb(n_z, 2) + n_z + n_clauses
    return {"gamma_x": gx, "gamma_y": gy, "gamma_z": gz, "goal": goal}


def _lit_name(var, negated):
    return f"~x{var}" if negated else f"x{var}"


def compile_b3sat_to_umcn(q: QbfInstance):
    """Build the critical node instance of an exists-forall-exists 3-CNF formula.

    Returns (McnInstance, McnProvenance).
    """
    if len(q.blocks) != 3:
        raise ShapeError(f"needs exactly 3 blocks, got {len(q.blocks)}")
    if q.matrix_negated:
        raise ShapeError("needs a non-negated matrix")
    if not q.matrix:
        raise ShapeError("needs at least one clause")
    xs, ys, zs = (list(b.vars) for b in q.blocks)
    k = gadget_sizes(len(xs), len(ys), len(zs), len(q.matrix))
    labels = []
    edges = []
    lit = {}

    def add(label):
        labels.append(label)
        return len(labels) - 1

    for var in xs + ys + zs:
        for neg in (False, True):
            lit[(var, neg)] = add("v_" + _lit_name(var, neg))

    def pair_gadgets(variables, size):
        literals = [(v, neg) for v in variables for neg in (False, True)]
        for a, b in itertools.combinations(literals, 2):
            if a[0] == b[0]:
                continue
            for j in range(size):
                c = add(f"C[{_lit_name(*a)},{_lit_name(*b)}]#{j}")
                edges.append((lit[a], c))
                edges.append((lit[b], c))

    pair_gadgets(xs, k["gamma_x"])
    pair_gadgets(zs, k["gamma_z"])
    for y in ys:
        for neg in (False, True):
            for j in range(k["gamma_y"]):
                edges.append((lit[(y, neg)], add(f"S[{_lit_name(y, neg)}]#{j}")))
        for j in range(k["gamma_y"]):
            c = add(f"K[x{y}]#{j}")
            edges.append((lit[(y, False)], c))
            edges.append((lit[(y, True)], c))
    for a in xs + zs:
        for b in ys:
            for na in (False, True):
                for nb in (False, True):
                    edges.append((lit[(a, na)], lit[(b, nb)]))
    for ci, clause in enumerate(q.matrix):
        for idx, truth in enumerate(itertools.product((False, True), repeat=len(clause.literals))):
            if not any(truth):
                continue
            v = add(f"clause{ci}#{idx}")
            for l, true in zip(clause.literals, truth):
                # a true literal attaches to its own vertex, a false one to the complement
                edges.append((lit[(l.var, l.negated if true else not l.negated)], v))
    inst = McnInstance(len(labels), tuple(edges), len(xs), len(xs) + len(ys), len(ys) + len(zs), k["goal"])
    return inst, McnProvenance(tuple(labels), lit, k, (tuple(xs), tuple(ys), tuple(zs)))


# -- I/O -----------------------------------------------------------------------

def mcn_to_json(inst: McnInstance) -> dict:
    return {
        "game": "umcn",
        "n": inst.num_vertices,
        "edges": [list(e) for e in inst.edges],
        "omega": inst.vaccinate_budget,
        "phi": inst.infect_budget,
        "lambda": inst.protect_budget,
        "K": str(inst.goal),
    }


def mcn_from_json(data: dict) -> McnInstance:
    try:
        return McnInstance(int(data["n"]), tuple((int(u), int(v)) for u, v in data["edges"]),
                           int(data["omega"]), int(data["phi"]), int(data["lambda"]), int(data["K"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed graph instance: {exc}") from None


_COLORS = {
    VACCINATED: "green",
    PROTECTED: "lightblue",
    DIRECTLY_INFECTED: "red",
    INDIRECTLY_INFECTED: "orange",
    SAVED: "white",
}


def mcn_dot(inst: McnInstance, outcome: PlayOutcome | None = None, labels=None) -> str:
    lines = ["graph mcn {"]
    for v in range(inst.num_vertices):
        name = labels[v] if labels else f"v{v + 1}"
        attrs = f'label="{name}"'
        if outcome is not None:
            attrs += f', style=filled, fillcolor={_COLORS[outcome.states[v]]}'
        lines.append(f"  {v} [{attrs}];")
    for u, v in inst.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"
