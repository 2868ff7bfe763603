"""Maximum flow, the unit-cost max-flow fortification/interdiction game, and
the gadget compiler from two-block QBF.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .engine import Cardinality, LevelSpec, check_deadline, decide_alternating
from .errors import ParseError, ShapeError, SizeLimitError
from .qbf import QbfInstance, Role

MAX_ARCS = 48
MAX_ATTACK = 4


@dataclass(frozen=True)
class Arc:
    u: int
    v: int
    cap: int


@dataclass(frozen=True)
class FlowNetwork:
    num_nodes: int
    arcs: tuple
    s: int
    t: int

    def __post_init__(self):
        if self.s == self.t:
            raise ShapeError("source and sink must differ")
        for a in self.arcs:
            if not (0 <= a.u < self.num_nodes and 0 <= a.v < self.num_nodes):
                raise ShapeError(f"arc {a} leaves the node range")
            if a.cap < 0:
                raise ShapeError("capacities must be nonnegative")


@dataclass(frozen=True)
class MfipfInstance:
    network: FlowNetwork
    goal: int
    fortify_budget: int
    attack_budget: int

    def __post_init__(self):
        if self.fortify_budget < 0 or self.attack_budget < 0:
            raise ShapeError("budgets must be nonnegative")


def max_flow_with_arcs(net: FlowNetwork, removed: int = 0):
    """Shortest-augmenting-path max flow; returns (value, flow per arc).

    Arcs whose bit is set in `removed` are absent.
    """
    n = net.num_nodes
    heads = []   # residual edge -> head node
    res = []     # residual capacity
    adj = [[] for _ in range(n)]
    for idx, a in enumerate(net.arcs):
        cap = 0 if removed >> idx & 1 else a.cap
        adj[a.u].append(len(heads))
        heads.append(a.v)
        res.append(cap)
        adj[a.v].append(len(heads))
        heads.append(a.u)
        res.append(0)
    s, t = net.s, net.t
    value = 0
    while True:
        parent = [-1] * n
        parent[s] = -2
        queue = deque([s])
        while queue and parent[t] == -1:
            x = queue.popleft()
            for e in adj[x]:
                y = heads[e]
                if parent[y] == -1 and res[e] > 0:
                    parent[y] = e
                    queue.append(y)
        if parent[t] == -1:
            break
        push = None
        y = t
        while y != s:
            e = parent[y]
            push = res[e] if push is None or res[e] < push else push
            y = heads[e ^ 1]
        y = t
        while y != s:
            e = parent[y]
            res[e] -= push
            res[e ^ 1] += push
            y = heads[e ^ 1]
        value += push
    flows = [res[2 * i + 1] for i in range(len(net.arcs))]
    return value, flows


def max_flow(net: FlowNetwork, removed: int = 0):
    return max_flow_with_arcs(net, removed)[0]


def min_cut_side(net: FlowNetwork, removed: int = 0) -> set:
    """Nodes reachable from s in the final residual graph (the source side of a min cut)."""
    value, flows = max_flow_with_arcs(net, removed)
    seen = {net.s}
    stack = [net.s]
    while stack:
        x = stack.pop()
        for idx, a in enumerate(net.arcs):
            if removed >> idx & 1:
                continue
            if a.u == x and a.v not in seen and flows[idx] < a.cap:
                seen.add(a.v)
                stack.append(a.v)
            elif a.v == x and a.u not in seen and flows[idx] > 0:
                seen.add(a.u)
                stack.append(a.u)
    return seen


# -- the game -----------------------------------------------------------------

class AttackSearch:
    """Exact search for an attack pushing max flow below the goal.

    Any successful attack must hit an arc carrying flow in the current
    maximum flow (otherwise that flow survives), so branching only on those
    arcs is complete. Removing a set of arcs lowers the max flow by at most
    the flow they carry, which bounds hopeless branches.
    """

    def __init__(self, inst: MfipfInstance):
        self.inst = inst
        self._flows: dict = {}

    def flow(self, removed: int):
        hit = self._flows.get(removed)
        if hit is None:
            hit = max_flow_with_arcs(self.inst.network, removed)
            self._flows[removed] = hit
        return hit

    def find(self, fortified: int = 0, accept=None):
        """A winning attack (bitmask) avoiding `fortified`, or None.

        With `accept`, only attacks satisfying the predicate count; supersets
        of rejected winning attacks are then explored too.
        """
        inst = self.inst
        failed = set()
        m = len(inst.network.arcs)

        def rec(removed, k):
            if (removed, k) in failed:
                return None
            check_deadline()
            value, flows = self.flow(removed)
            if value < inst.goal:
                if accept is None or accept(removed):
                    return removed
                if k == 0:
                    failed.add((removed, k))
                    return None
                for a in range(m):
                    bit = 1 << a
                    if not (removed | fortified) & bit:
                        found = rec(removed | bit, k - 1)
                        if found is not None:
                            return found
                failed.add((removed, k))
                return None
            if k == 0:
                return None
            cands = [a for a in range(m)
                     if flows[a] > 0 and not (removed | fortified) >> a & 1]
            cands.sort(key=lambda a: (-flows[a], a))
            if value - sum(flows[a] for a in cands[:k]) >= inst.goal:
                failed.add((removed, k))
                return None
            for a in cands:
                found = rec(removed | 1 << a, k - 1)
                if found is not None:
                    return found
            failed.add((removed, k))
            return None

        return rec(0, inst.attack_budget)


def _guard(inst: MfipfInstance):
    if len(inst.network.arcs) > MAX_ARCS:
        raise SizeLimitError(f"{len(inst.network.arcs)} arcs exceed the limit of {MAX_ARCS}")
    if inst.attack_budget > MAX_ATTACK:
        raise SizeLimitError(f"attack budget {inst.attack_budget} exceeds {MAX_ATTACK}")


def umfipf_levels(inst: MfipfInstance) -> list[LevelSpec]:
    m = len(inst.network.arcs)
    return [
        LevelSpec(Role.EXISTS, m, Cardinality(inst.fortify_budget), group="fortify"),
        LevelSpec(Role.FORALL, m, Cardinality(inst.attack_budget), excludes=(0,), group="attack"),
    ]


def umfipf_decide(inst: MfipfInstance, prune: bool = True):
    """Is there a fortification of at most B arcs keeping max flow >= K under every attack?

    With `prune` the inner attack is answered by `AttackSearch`; without it
    every (fortification, attack) pair is enumerated.
    """
    _guard(inst)
    levels = umfipf_levels(inst)
    if not prune:
        return decide_alternating(levels, lambda s: max_flow(inst.network, s[1]) >= inst.goal,
                                  prune=False)
    search = AttackSearch(inst)
    return decide_alternating(levels[:1], lambda s: search.find(s[0]) is None)


# -- compiler -----------------------------------------------------------------

@dataclass
class FlowProvenance:
    """Names of nodes, role of every arc, and the construction constants."""
    node_names: list
    arc_roles: list
    constants: dict = field(default_factory=dict)

    def arcs_with(self, role, key=None):
        return [i for i, (r, k) in enumerate(self.arc_roles) if r == role and (key is None or k == key)]


def gadget_constants(n_clauses: int, n_y: int) -> dict:
    cyp = n_clauses + 1
    cy = (2 * n_y - 1) * cyp
    cx = (2 * n_y - 1) * cy
    return {"c_Yp": cyp, "c_Y": cy, "c_X": cx, "c_u": Fraction(cx, 2 * n_y)}


def compile_b2sat_to_umfipf(q: QbfInstance, integral: bool = True):
    """Exists X forall Y E  ->  (MfipfInstance, FlowProvenance).

    With `integral` every capacity and the goal are multiplied by the
    smallest factor making the spread capacity c_X/(2|Y|) an integer;
    otherwise capacities stay exact rationals.
    """
    if len(q.blocks) != 2:
        raise ShapeError(f"needs 2 quantifier blocks, got {len(q.blocks)}")
    if q.matrix_negated:
        raise ShapeError("needs matrix_negated=False")
    if not q.matrix:
        raise ShapeError("needs at least one clause")
    xs, ys = q.blocks[0].vars, q.blocks[1].vars
    if len(ys) < 2:
        raise ShapeError("the universal block needs at least two variables")
    return _build_flow(q, xs, ys, integral)


def _build_flow(q, xs, ys, integral):
    const = gadget_constants(len(q.matrix), len(ys))
    cyp, cy, cx = const["c_Yp"], const["c_Y"], const["c_X"]
    scale = 2 * len(ys) // gcd(cx, 2 * len(ys)) if integral else 1
    const["scale"] = scale
    cu = const["c_u"]
    names = ["s", "t"]
    roles = []
    arcs = []

    def node(name):
        names.append(name)
        return len(names) - 1

    def arc(u, v, cap, role, key):
        cap = cap * scale
        if integral:
            cap = int(cap)
        arcs.append(Arc(u, v, cap))
        roles.append((role, key))

    def gamma(var, negated):
        return sum(1 for c in q.matrix if c.contains(var, negated))

    lit_node = {}
    ny = len(ys)
    for x in xs:
        vx = node(f"v_x{x + 1}")
        vnx = node(f"v_~x{x + 1}")
        lit_node[(x, False)], lit_node[(x, True)] = vx, vnx
        us = [node(f"u{i + 1}_x{x + 1}") for i in range(3 * ny)]
        arc(0, vx, cx + gamma(x, False), "x_source", (x, False))
        arc(0, vnx, cx + gamma(x, True), "x_source", (x, True))
        for i in range(2 * ny):
            arc(vx, us[i], cu, "x_spread", (x, False, i))
        for i in range(ny, 3 * ny):
            arc(vnx, us[i], cu, "x_spread", (x, True, i))
        for i, u in enumerate(us):
            arc(u, 1, cu, "x_sink", (x, i))
    literals = [(y, neg) for y in ys for neg in (False, True)]
    for y, neg in literals:
        lit_node[(y, neg)] = node(("v_~y" if neg else "v_y") + str(y + 1))
        arc(0, lit_node[(y, neg)], cy + gamma(y, neg), "y_source", (y, neg))
    for a, b in itertools.combinations(literals, 2):
        u = node(f"u[{_lit_name(a)},{_lit_name(b)}]")
        arc(lit_node[a], u, cyp, "y_pair", (a, b, 0))
        arc(lit_node[b], u, cyp, "y_pair", (a, b, 1))
        complementary = a[0] == b[0]
        arc(u, 1, cyp if complementary else 2 * cyp, "y_sink", (a, b))
    for k, c in enumerate(q.matrix):
        vc = node(f"v_c{k + 1}")
        for lit in c.literals:
            arc(lit_node[(lit.var, lit.negated)], vc, 1, "clause_in", (k, lit.var, lit.negated))
        arc(vc, 1, 1, "clause_out", k)
    goal = (len(xs) * cx + 2 * ny * (ny - 1) * cyp + len(q.matrix)) * scale
    net = FlowNetwork(len(names), tuple(arcs), 0, 1)
    inst = MfipfInstance(net, goal, len(xs), len(xs) + ny)
    return inst, FlowProvenance(names, roles, const)


def _lit_name(lit):
    var, neg = lit
    return ("~" if neg else "") + f"y{var + 1}"


# -- serialization -------------------------------------------------------------

def _num(text):
    value = Fraction(text)
    return int(value) if value.denominator == 1 else value


def mfipf_to_json(inst: MfipfInstance) -> dict:
    net = inst.network
    return {
        "game": "umfipf",
        "nodes": net.num_nodes,
        "arcs": [{"u": a.u, "v": a.v, "cap": str(a.cap)} for a in net.arcs],
        "s": net.s,
        "t": net.t,
        "K": str(inst.goal),
        "B": inst.fortify_budget,
        "W": inst.attack_budget,
    }


def mfipf_from_json(data: dict) -> MfipfInstance:
    try:
        arcs = tuple(Arc(int(a["u"]), int(a["v"]), _num(a["cap"])) for a in data["arcs"])
        net = FlowNetwork(int(data["nodes"]), arcs, int(data["s"]), int(data["t"]))
        return MfipfInstance(net, _num(data["K"]), int(data["B"]), int(data["W"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed network instance: {exc}") from None


def network_dot(net: FlowNetwork, names=None, fortified=(), attacked=()) -> str:
    names = names or [str(i) for i in range(net.num_nodes)]
    lines = ["digraph network {", "  rankdir=LR;"]
    for i, name in enumerate(names):
        lines.append(f'  n{i} [label="{name}"];')
    for idx, a in enumerate(net.arcs):
        style = ""
        if idx in fortified:
            style = ", color=blue, penwidth=2"
        elif idx in attacked:
            style = ", color=red, style=dashed"
        lines.append(f'  n{a.u} -> n{a.v} [label="{a.cap}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def provenance_to_json(prov: FlowProvenance) -> dict:
    return {
        "nodes": prov.node_names,
        "arcs": [{"role": r, "key": _jsonable(k)} for r, k in prov.arc_roles],
        "constants": {k: str(v) for k, v in prov.constants.items()},
    }


def _jsonable(key):
    if isinstance(key, tuple):
        return [_jsonable(k) for k in key]
    return key


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"
