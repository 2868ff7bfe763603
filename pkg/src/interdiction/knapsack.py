"""Knapsack interdiction games with unit fortification and attack costs.

UBIK is the one-round attack game (m=1), UTIK adds a fortification round on
top (m=2), and UMIK alternates m rounds of fortification and attack above the
follower's knapsack problem.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from collections.abc import Sequence
from dataclasses import dataclass

from .engine import Cardinality, LevelSpec, decide_alternating, to_mask
from .errors import ParseError, ShapeError, SizeLimitError
from .qbf import Role

KP_ITEM_LIMIT = 25
UMIK_MAX_ROUNDS = 4


@dataclass(frozen=True)
class KnapsackItem:
    weight: int
    profit: int


@dataclass(frozen=True)
class UmikInstance:
    """Items, capacity W, goal K and budgets [B_2, ..., B_{m+1}]."""
    items: tuple
    capacity: int
    goal: int
    level_budgets: tuple
    conformant: bool = True

    def __post_init__(self):
        if len(self.level_budgets) < 1:
            raise ShapeError("at least one upper round is required")
        if any(b < 0 for b in self.level_budgets):
            raise ShapeError("budgets must be nonnegative")
        if self.capacity < 0 or self.goal < 0:
            raise ShapeError("capacity and goal must be nonnegative")
        low = 1 if self.conformant else 0
        for it in self.items:
            if it.weight < low or it.profit < low:
                raise ShapeError("item weights and profits must be positive "
                                 "(pass conformant=False for test instances)")

    @property
    def m(self) -> int:
        return len(self.level_budgets)

    @property
    def n(self) -> int:
        return len(self.items)

    def budget(self, level: int) -> int:
        """Budget of round `level` (2..m+1)."""
        return self.level_budgets[level - 2]

    def with_budgets(self, budgets) -> UmikInstance:
        return UmikInstance(self.items, self.capacity, self.goal, tuple(budgets), self.conformant)


def make_umik(pairs, capacity, goal, budgets, conformant=True) -> UmikInstance:
    """Shorthand: `pairs` is a list of (weight, profit)."""
    return UmikInstance(tuple(KnapsackItem(w, p) for w, p in pairs), capacity, goal,
                        tuple(budgets), conformant)


# -- follower knapsack -----------------------------------------------------------

def _subset_sums(items):
    """All (weight, profit) sums over subsets of `items`."""
    sums = [(0, 0)]
    for it in items:
        sums += [(w + it.weight, p + it.profit) for w, p in sums]
    return sums


def _frontier(pairs):
    """Weights ascending with strictly increasing profits (dominated sums dropped)."""
    pairs = sorted(pairs, key=lambda wp: (wp[0], -wp[1]))
    ws, ps = [], []
    for w, p in pairs:
        if not ps or p > ps[-1]:
            if ws and ws[-1] == w:
                continue
            ws.append(w)
            ps.append(p)
    return ws, ps


def kp_max_profit(items: Sequence[KnapsackItem], capacity: int) -> int:
    """Best total profit of a subset with total weight <= capacity.

    Exact meet-in-the-middle over the subset lattice: subset sums of each
    half, then the best partner for every left sum from the right frontier.
    """
    if capacity < 0:
        raise ShapeError("capacity must be nonnegative")
    items = list(items)
    if len(items) > KP_ITEM_LIMIT:
        raise SizeLimitError(f"{len(items)} items exceed the limit of {KP_ITEM_LIMIT}")
    half = len(items) // 2
    left = _subset_sums(items[:half])
    ws, ps = _frontier(_subset_sums(items[half:]))
    best = 0
    for w, p in left:
        if w > capacity:
            continue
        j = bisect_right(ws, capacity - w) - 1
        if j >= 0 and p + ps[j] > best:
            best = p + ps[j]
    return best


class KnapsackOracle:
    """Repeated knapsack queries over one item list with items switched off.

    Subset sums of both halves are computed once; each query filters them by
    the excluded mask (results cached per half) and merges the two frontiers.
    """

    def __init__(self, items: Sequence[KnapsackItem], capacity: int):
        items = list(items)
        if len(items) > KP_ITEM_LIMIT:
            raise SizeLimitError(f"{len(items)} items exceed the limit of {KP_ITEM_LIMIT}")
        self.items = items
        self.capacity = capacity
        half = len(items) // 2
        self._halves = [self._tabulate(items, range(half)), self._tabulate(items, range(half, len(items)))]
        self._masks = [to_mask(range(half)), to_mask(range(half, len(items)))]
        self._cache = [{}, {}]

    @staticmethod
    def _tabulate(items, indices):
        rows = [(0, 0, 0)]
        for i in indices:
            it = items[i]
            bit = 1 << i
            rows += [(w + it.weight, p + it.profit, m | bit) for w, p, m in rows]
        rows.sort(key=lambda r: (r[0], -r[1]))
        return rows

    def _frontier(self, side, excluded):
        key = excluded & self._masks[side]
        hit = self._cache[side].get(key)
        if hit is not None:
            return hit
        ws, ps = [], []
        for w, p, m in self._halves[side]:
            if m & key:
                continue
            if not ps or p > ps[-1]:
                if ws and ws[-1] == w:
                    continue
                ws.append(w)
                ps.append(p)
        self._cache[side][key] = (ws, ps)
        return ws, ps

    def max_profit(self, excluded: int = 0, capacity: int | None = None) -> int:
        cap = self.capacity if capacity is None else capacity
        if cap < 0:
            return -1
        ws1, ps1 = self._frontier(0, excluded)
        ws2, ps2 = self._frontier(1, excluded)
        best = 0
        j = len(ws2) - 1
        for w, p in zip(ws1, ps1):
            if w > cap:
                break
            room = cap - w
            while j >= 0 and ws2[j] > room:
                j -= 1
            if j < 0:
                break
            if p + ps2[j] > best:
                best = p + ps2[j]
        return best

    def max_profit_with(self, forced: int, excluded: int = 0) -> int:
        """Best profit among subsets containing every item of `forced`; -1 if none fits."""
        w = sum(self.items[i].weight for i in range(len(self.items)) if forced >> i & 1)
        p = sum(self.items[i].profit for i in range(len(self.items)) if forced >> i & 1)
        if forced & excluded or w > self.capacity:
            return -1
        return p + self.max_profit(excluded | forced, self.capacity - w)


# -- games ---------------------------------------------------------------------

def _require_rounds(inst: UmikInstance, m: int, name: str):
    if inst.m != m:
        raise ShapeError(f"{name} needs m={m}, got m={inst.m}")


def ubik_decide(inst: UmikInstance, prune: bool = True):
    """Is there an attack of at most B_2 items keeping the follower below K?"""
    _require_rounds(inst, 1, "UBIK")
    oracle = KnapsackOracle(inst.items, inst.capacity)
    levels = [LevelSpec(Role.EXISTS, inst.n, Cardinality(inst.budget(2)), group="attack")]
    return decide_alternating(levels, lambda s: oracle.max_profit(s[0]) < inst.goal, prune=prune)


def utik_decide(inst: UmikInstance, prune: bool = True):
    """Can B_3 fortified items guarantee profit >= K against any B_2 attack?"""
    _require_rounds(inst, 2, "UTIK")
    oracle = KnapsackOracle(inst.items, inst.capacity)
    levels = [
        LevelSpec(Role.EXISTS, inst.n, Cardinality(inst.budget(3)), group="fortify"),
        LevelSpec(Role.FORALL, inst.n, Cardinality(inst.budget(2)), excludes=(0,), group="attack"),
    ]
    return decide_alternating(levels, lambda s: oracle.max_profit(s[1]) >= inst.goal, prune=prune)


def umik_levels(inst: UmikInstance) -> list[LevelSpec]:
    """Rounds m+1 (top) down to 2: even rounds attack, odd rounds fortify.

    Every round picks among items not yet fortified or interdicted.
    """
    levels = []
    role = Role.EXISTS
    for depth, level in enumerate(range(inst.m + 1, 1, -1)):
        levels.append(LevelSpec(role, inst.n, Cardinality(inst.budget(level)),
                                excludes=tuple(range(depth)),
                                group="attack" if level % 2 == 0 else "fortify"))
        role = role.flipped()
    return levels


def umik_decide(inst: UmikInstance, prune: bool = True):
    if inst.m > UMIK_MAX_ROUNDS:
        raise SizeLimitError(f"m={inst.m} exceeds the limit of {UMIK_MAX_ROUNDS}")
    levels = umik_levels(inst)
    attack_levels = [i for i, spec in enumerate(levels) if spec.group == "attack"]
    oracle = KnapsackOracle(inst.items, inst.capacity)
    odd = inst.m % 2 == 1

    def leaf(state):
        interdicted = 0
        for i in attack_levels:
            interdicted |= state[i]
        best = oracle.max_profit(interdicted)
        return best < inst.goal if odd else best >= inst.goal

    return decide_alternating(levels, leaf, prune=prune, compress=True)


def umik_unit_fastpath(inst: UmikInstance) -> bool:
    """Greedy evaluation when all weights or all profits equal 1.

    Every round fixes the not-yet-fixed items most valuable to the follower:
    highest profit under unit weights, lowest weight under unit profits.
    """
    unit_weights = all(it.weight == 1 for it in inst.items)
    unit_profits = all(it.profit == 1 for it in inst.items)
    if not (unit_weights or unit_profits):
        raise ShapeError("fast path needs unit weights or unit profits")
    if unit_weights:
        rank = sorted(range(inst.n), key=lambda i: (-inst.items[i].profit, i))
    else:
        rank = sorted(range(inst.n), key=lambda i: (inst.items[i].weight, i))
    fixed = set()
    interdicted = set()
    for level in range(inst.m + 1, 1, -1):
        chosen = [i for i in rank if i not in fixed][:inst.budget(level)]
        fixed.update(chosen)
        if level % 2 == 0:
            interdicted.update(chosen)
    left = [inst.items[i] for i in rank if i not in interdicted]
    if unit_weights:
        best = sum(it.profit for it in left[:inst.capacity])
    else:
        best = 0
        room = inst.capacity
        for it in left:
            if it.weight > room:
                break
            room -= it.weight
            best += 1
    return best < inst.goal if inst.m % 2 == 1 else best >= inst.goal


# -- JSON ----------------------------------------------------------------------

def umik_to_json(inst: UmikInstance) -> dict:
    return {
        "game": "umik",
        "items": [{"w": str(it.weight), "p": str(it.profit)} for it in inst.items],
        "W": str(inst.capacity),
        "K": str(inst.goal),
        "budgets": list(inst.level_budgets),
        "m": inst.m,
    }


def umik_from_json(data: dict, conformant: bool = True) -> UmikInstance:
    try:
        items = tuple(KnapsackItem(int(d["w"]), int(d["p"])) for d in data["items"])
        budgets = tuple(int(b) for b in data["budgets"])
        inst = UmikInstance(items, int(data["W"]), int(data["K"]), budgets, conformant)
        m = int(data.get("m", len(budgets)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed knapsack instance: {exc}") from None
    if m != len(budgets):
        raise ParseError(f"m={m} but {len(budgets)} budgets given")
    return inst


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"
