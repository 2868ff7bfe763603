"""Shortest paths under arc removal and the shortest-path fortification game."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass

from .engine import Cardinality, LevelSpec, Weighted, decide_alternating, to_mask
from .errors import ParseError, ShapeError, SizeLimitError
from .knapsack import UmikInstance
from .qbf import Role

UNREACHABLE = math.inf
MAX_ARCS = 36


@dataclass(frozen=True)
class SpArc:
    u: int
    v: int
    length: int
    cost: int


@dataclass(frozen=True)
class SpGraph:
    num_nodes: int
    arcs: tuple
    s: int
    t: int

    def __post_init__(self):
        for a in self.arcs:
            if not (0 <= a.u < self.num_nodes and 0 <= a.v < self.num_nodes):
                raise ShapeError(f"arc {a} leaves the node range")
            if a.length < 0 or a.cost < 0:
                raise ShapeError("lengths and costs must be nonnegative")


@dataclass(frozen=True)
class SpipufInstance:
    graph: SpGraph
    fortify_budget: int
    attack_budget: int
    goal: int

    def __post_init__(self):
        if self.fortify_budget < 0 or self.attack_budget < 0:
            raise ShapeError("budgets must be nonnegative")


def shortest_path(graph: SpGraph, removed: int = 0):
    """Dijkstra over the arcs not in `removed`; UNREACHABLE if t cannot be reached."""
    adj = [[] for _ in range(graph.num_nodes)]
    for idx, a in enumerate(graph.arcs):
        if not removed >> idx & 1:
            adj[a.u].append((a.v, a.length))
    dist = {graph.s: 0}
    heap = [(0, graph.s)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        if x == graph.t:
            return d
        done.add(x)
        for y, length in adj[x]:
            nd = d + length
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return UNREACHABLE


def spipuf_levels(inst: SpipufInstance, restrict: bool = True) -> list[LevelSpec]:
    arcs = inst.graph.arcs
    costs = tuple(a.cost for a in arcs)
    # fortifying an arc the attacker can never afford is pointless
    useful = to_mask(i for i, c in enumerate(costs) if c <= inst.attack_budget) if restrict else None
    return [
        LevelSpec(Role.EXISTS, len(arcs), Cardinality(inst.fortify_budget), eligible=useful,
                  group="fortify"),
        LevelSpec(Role.FORALL, len(arcs), Weighted(costs, inst.attack_budget), excludes=(0,),
                  group="attack"),
    ]


def spipuf_decide(inst: SpipufInstance, prune: bool = True, on_leaf=None):
    """Is there a fortification keeping the shortest s-t path below the goal under every affordable attack?

    `on_leaf(fortified, attacked)` is called on every evaluated pair (masks).
    """
    if len(inst.graph.arcs) > MAX_ARCS:
        raise SizeLimitError(f"{len(inst.graph.arcs)} arcs exceed the limit of {MAX_ARCS}")
    cache = {}

    def leaf(state):
        if on_leaf is not None:
            on_leaf(state[0], state[1])
        attacked = state[1]
        if attacked not in cache:
            cache[attacked] = shortest_path(inst.graph, attacked)
        return cache[attacked] < inst.goal

    return decide_alternating(spipuf_levels(inst, restrict=prune), leaf, prune=prune, compress=True)


def compile_ubik_to_spipuf(u: UmikInstance):
    """Chain of item gadgets; returns (SpipufInstance, per-arc provenance).

    Nodes 0..n form the chain, node n+i is the detour node of item i.
    """
    if u.m != 1:
        raise ShapeError("needs a one-round (UBIK) instance")
    n = u.n
    arcs, prov = [], []
    unattackable = u.capacity + 1
    for i, it in enumerate(u.items, 1):
        arcs.append(SpArc(i - 1, i, it.profit + 2, unattackable))
        prov.append(("chain", i - 1))
        arcs.append(SpArc(i - 1, n + i, 1, it.weight))
        prov.append(("detour_in", i - 1))
        arcs.append(SpArc(n + i, i, 1, unattackable))
        prov.append(("detour_out", i - 1))
    graph = SpGraph(2 * n + 1, tuple(arcs), 0, n)
    return SpipufInstance(graph, u.budget(2), u.capacity, u.goal + 2 * n), prov


def spipuf_to_json(inst: SpipufInstance) -> dict:
    g = inst.graph
    return {
        "game": "spipuf",
        "nodes": g.num_nodes,
        "arcs": [{"u": a.u, "v": a.v, "len": str(a.length), "cost": str(a.cost)} for a in g.arcs],
        "s": g.s,
        "t": g.t,
        "B": inst.fortify_budget,
        "W": str(inst.attack_budget),
        "K": str(inst.goal),
    }


def spipuf_from_json(data: dict) -> SpipufInstance:
    try:
        arcs = tuple(SpArc(int(a["u"]), int(a["v"]), int(a["len"]), int(a["cost"])) for a in data["arcs"])
        nodes = int(data.get("nodes", 1 + max((max(a.u, a.v) for a in arcs), default=0)))
        g = SpGraph(nodes, arcs, int(data["s"]), int(data["t"]))
        return SpipufInstance(g, int(data["B"]), int(data["W"]), int(data["K"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed path instance: {exc}") from None


def graph_dot(g: SpGraph, fortified=(), attacked=()) -> str:
    lines = ["digraph paths {", "  rankdir=LR;"]
    for idx, a in enumerate(g.arcs):
        style = ""
        if idx in fortified:
            style = ", color=blue, penwidth=2"
        elif idx in attacked:
            style = ", color=red, style=dashed"
        lines.append(f'  n{a.u} -> n{a.v} [label="{a.length},{a.cost}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"
