"""Digit-encoded compilers from alternating QBF to knapsack interdiction games.

Numbers are built in base 10. The lowest digits belong to clauses (first
clause most significant among them), then to the variables block by block
from the innermost outwards, with the first variable of a block leftmost.
Variables of interdiction rounds take two digits (high, low), all others one.
The highest block, starting at position M, carries the round counters.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import ShapeError
from .knapsack import KnapsackItem, UmikInstance
from .qbf import QbfInstance, Role

ROLES = ("i_pos", "i_neg", "j", "j_prime", "clause_1", "clause_2")


@dataclass(frozen=True)
class DigitLayout:
    """Digit positions (0 = least significant).

    `var_positions[v]` is `(pos,)` or `(high, low)`. `M` is the 1-based index
    of the first high-order digit, so the high block is scaled by 10**(M-1).
    """
    n_clauses: int
    var_positions: tuple
    M: int
    M_width: int

    def clause_position(self, k: int) -> int:
        return self.n_clauses - 1 - k

    @property
    def scale(self) -> int:
        return 10 ** (self.M - 1)

    def split(self, value: int) -> tuple[int, list[int]]:
        """High block value and lower digits, most significant first."""
        high, low = divmod(value, self.scale)
        digits = [(low // 10 ** pos) % 10 for pos in range(self.M - 2, -1, -1)]
        return high, digits

    def columns(self, names: Sequence[str]) -> list[str]:
        """Column labels in the order `split` returns digits."""
        by_pos = {}
        for v, pos in enumerate(self.var_positions):
            if len(pos) == 2:
                by_pos[pos[0]] = names[v] + "^"
                by_pos[pos[1]] = names[v] + "_"
            else:
                by_pos[pos[0]] = names[v]
        for k in range(self.n_clauses):
            by_pos[self.clause_position(k)] = f"c{k + 1}"
        return ["M"] + [by_pos[p] for p in range(self.M - 2, -1, -1)]


@dataclass(frozen=True)
class CompiledArtifact:
    instance: UmikInstance
    layout: DigitLayout
    provenance: tuple  # per item: (role, variable or clause index)
    source: QbfInstance | None = None
    kind: str = "umik"

    def items_with(self, role: str, index: int | None = None) -> list[int]:
        return [i for i, (r, k) in enumerate(self.provenance)
                if r == role and (index is None or k == index)]

    def item_name(self, i: int, names: Sequence[str] | None = None) -> str:
        role, k = self.provenance[i]
        if role.startswith("clause"):
            return f"i{role[-1]}_c{k + 1}"
        var = names[k] if names else f"x{k + 1}"
        return {"i_pos": f"i_{var}", "i_neg": f"i_~{var}", "j": f"j_{var}",
                "j_prime": f"j'_{var}"}[role]


def _layout(q: QbfInstance, doubled: Sequence[bool]) -> tuple[list, int]:
    """Assign digit positions; `doubled[b]` says whether block b uses two digits per variable."""
    positions = [None] * q.num_vars
    pos = len(q.matrix)
    for b in range(len(q.blocks) - 1, -1, -1):
        for v in reversed(q.blocks[b].vars):
            if doubled[b]:
                positions[v] = (pos + 1, pos)
                pos += 2
            else:
                positions[v] = (pos,)
                pos += 1
    return positions, pos + 1


def _occurrences(q: QbfInstance, var: int, negated: bool) -> int:
    n = len(q.matrix)
    return sum(10 ** (n - 1 - k) for k, c in enumerate(q.matrix) if c.contains(var, negated))


def _finish(q, items, provenance, positions, M, capacity, goal, budgets, kind):
    scale = 10 ** (M - 1)
    high_sum = sum(it.profit // scale for it in items)
    layout = DigitLayout(len(q.matrix), tuple(positions), M, len(str(high_sum)) + 1)
    inst = UmikInstance(tuple(items), capacity, goal, tuple(budgets))
    return CompiledArtifact(inst, layout, tuple(provenance), q, kind)


def _check_shape(q: QbfInstance, blocks: int, negated: bool, family: str):
    if len(q.blocks) != blocks:
        raise ShapeError(f"{family} needs {blocks} quantifier blocks, got {len(q.blocks)}")
    if q.matrix_negated != negated:
        raise ShapeError(f"{family} needs matrix_negated={negated}")
    if not q.matrix:
        raise ShapeError(f"{family} needs at least one clause")


def compile_b2_to_ubik(q: QbfInstance) -> CompiledArtifact:
    """Exists X forall Y never-E  ->  one-round knapsack interdiction."""
    _check_shape(q, 2, True, "UBIK")
    xs, ys = q.blocks[0].vars, q.blocks[1].vars
    positions, M = _layout(q, [True, False])
    scale = 10 ** (M - 1)
    items, prov = [], []

    def add(w, p, role, idx):
        items.append(KnapsackItem(w, p))
        prov.append((role, idx))

    for x in xs:
        hi, lo = positions[x]
        for negated, role in ((False, "i_pos"), (True, "i_neg")):
            w = 10 ** hi + _occurrences(q, x, negated)
            add(w, w + scale, role, x)
        add(2 * 10 ** hi, 2 * 10 ** hi, "j", x)
        add(10 ** hi, 10 ** lo, "j_prime", x)
    for y in ys:
        (pos,) = positions[y]
        for negated, role in ((False, "i_pos"), (True, "i_neg")):
            w = 10 ** pos + _occurrences(q, y, negated)
            add(w, w, role, y)
    for k in range(len(q.matrix)):
        pos = len(q.matrix) - 1 - k
        add(10 ** pos, 10 ** pos, "clause_1", k)
        add(2 * 10 ** pos, 2 * 10 ** pos, "clause_2", k)

    clause_fours = sum(4 * 10 ** k for k in range(len(q.matrix)))
    capacity = sum(10 ** positions[y][0] for y in ys) + sum(2 * 10 ** positions[x][0] for x in xs) \
        + clause_fours
    goal = sum(10 ** p for v in range(q.num_vars) for p in positions[v]) + clause_fours \
        + len(xs) * scale
    return _finish(q, items, prov, positions, M, capacity, goal, [len(xs)], "ubik")


def compile_b3_to_utik(q: QbfInstance) -> CompiledArtifact:
    """Exists X forall Y exists Z E  ->  fortification over one-round interdiction."""
    _check_shape(q, 3, False, "UTIK")
    xs, ys, zs = (b.vars for b in q.blocks)
    positions, M = _layout(q, [False, True, False])
    scale = 10 ** (M - 1)
    items, prov = [], []

    def add(w, p, role, idx):
        items.append(KnapsackItem(w, p))
        prov.append((role, idx))

    for x in xs:
        (pos,) = positions[x]
        for negated, role in ((False, "i_pos"), (True, "i_neg")):
            w = 10 ** pos + _occurrences(q, x, negated)
            add(w, w + (len(ys) + 1) * scale, role, x)
    for y in ys:
        hi, lo = positions[y]
        for negated, role in ((False, "i_pos"), (True, "i_neg")):
            w = 10 ** hi + _occurrences(q, y, negated)
            add(w, w + scale, role, y)
        add(2 * 10 ** hi, 2 * 10 ** hi, "j", y)
        add(10 ** hi, 10 ** lo, "j_prime", y)
    for z in zs:
        (pos,) = positions[z]
        for negated, role in ((False, "i_pos"), (True, "i_neg")):
            w = 10 ** pos + _occurrences(q, z, negated)
            add(w, w, role, z)
    for k in range(len(q.matrix)):
        pos = len(q.matrix) - 1 - k
        add(10 ** pos, 10 ** pos, "clause_1", k)
        add(2 * 10 ** pos, 2 * 10 ** pos, "clause_2", k)

    clause_fours = sum(4 * 10 ** k for k in range(len(q.matrix)))
    capacity = sum(10 ** positions[v][0] for v in (*xs, *zs)) \
        + sum(2 * 10 ** positions[y][0] for y in ys) + clause_fours
    goal = sum(10 ** p for v in range(q.num_vars) for p in positions[v]) + clause_fours \
        + ((len(ys) + 1) * len(xs) + len(ys)) * scale
    return _finish(q, items, prov, positions, M, capacity, goal, [len(ys), len(xs)], "utik")


def round_multipliers(sizes_by_level: dict) -> dict:
    """Counter added at the high block to profits of round-l items (l >= 2).

    The value for round l is the product of (|X_l'| + 1) over rounds 2..l-1.
    """
    out = {}
    for level in sorted(sizes_by_level):
        if level < 2:
            continue
        prod = 1
        for lower in range(2, level):
            prod *= sizes_by_level[lower] + 1
        out[level] = prod
    return out


def compile_qbf_to_umik(q: QbfInstance) -> CompiledArtifact:
    """General m-round compiler; block b of m+1 blocks becomes round m+1-b."""
    k = len(q.blocks)
    if k < 2:
        raise ShapeError("need at least two quantifier blocks")
    m = k - 1
    if q.matrix_negated != (m % 2 == 1):
        raise ShapeError("matrix negation must match the parity of the number of rounds")
    if not q.matrix:
        raise ShapeError("need at least one clause")
    if any(b.role is not (Role.EXISTS if i % 2 == 0 else Role.FORALL) for i, b in enumerate(q.blocks)):
        raise ShapeError("blocks must alternate starting with an existential block")
    level_of = [k - b for b in range(k)]
    sizes = {level_of[b]: len(q.blocks[b].vars) for b in range(k)}
    mult = round_multipliers(sizes)
    positions, M = _layout(q, [level_of[b] % 2 == 0 for b in range(k)])
    scale = 10 ** (M - 1)
    items, prov = [], []
    for b, block in enumerate(q.blocks):
        level = level_of[b]
        for v in block.vars:
            top = positions[v][0]
            bonus = mult.get(level, 0) * scale
            for negated, role in ((False, "i_pos"), (True, "i_neg")):
                w = 10 ** top + _occurrences(q, v, negated)
                items.append(KnapsackItem(w, w + bonus))
                prov.append((role, v))
            if level % 2 == 0:
                hi, lo = positions[v]
                items.append(KnapsackItem(2 * 10 ** hi, 2 * 10 ** hi))
                prov.append(("j", v))
                items.append(KnapsackItem(10 ** hi, 10 ** lo))
                prov.append(("j_prime", v))
    for c in range(len(q.matrix)):
        pos = len(q.matrix) - 1 - c
        items.append(KnapsackItem(10 ** pos, 10 ** pos))
        prov.append(("clause_1", c))
        items.append(KnapsackItem(2 * 10 ** pos, 2 * 10 ** pos))
        prov.append(("clause_2", c))

    budgets = []
    for level in range(2, m + 2):
        if level % 2 == 0 or level == m + 1:
            budgets.append(sizes[level])
        else:
            budgets.append(sizes[level] + sizes[level + 1])
    clause_fours = sum(4 * 10 ** c for c in range(len(q.matrix)))
    capacity = clause_fours
    for b, block in enumerate(q.blocks):
        for v in block.vars:
            capacity += (2 if level_of[b] % 2 == 0 else 1) * 10 ** positions[v][0]
    high = sum(mult[level] * sizes[level] for level in range(2, m + 2))
    goal = sum(10 ** p for v in range(q.num_vars) for p in positions[v]) + clause_fours + high * scale
    kind = {1: "ubik", 2: "utik"}.get(m, "umik")
    return _finish(q, items, prov, positions, M, capacity, goal, budgets, kind)


# -- structural checks -----------------------------------------------------------

def column_sums(art: CompiledArtifact) -> tuple[list[int], list[int]]:
    """Per lower position, the digit sum over all items for weights and for profits."""
    lay = art.layout
    wsum = [0] * (lay.M - 1)
    psum = [0] * (lay.M - 1)
    for it in art.instance.items:
        for pos in range(lay.M - 1):
            wsum[pos] += (it.weight // 10 ** pos) % 10
            psum[pos] += (it.profit // 10 ** pos) % 10
    return wsum, psum


def no_carry(art: CompiledArtifact) -> bool:
    """All lower columns sum to at most 9 and the high block fits its width."""
    wsum, psum = column_sums(art)
    lay = art.layout
    high = sum(it.profit // lay.scale for it in art.instance.items)
    whigh = sum(it.weight // lay.scale for it in art.instance.items)
    return max(wsum + psum, default=0) <= 9 and len(str(max(high, whigh))) <= lay.M_width


def goal_digit_count(art: CompiledArtifact) -> int:
    """Digits of the goal: all lower positions plus the digits of its high-block value."""
    high = art.instance.goal // art.layout.scale
    return art.layout.M - 1 + len(str(high))


def stated_goal_digit_count(art: CompiledArtifact) -> int:
    """The size bound as usually written: lower digits plus ceil(log10(high value))."""
    high = art.instance.goal // art.layout.scale
    return art.layout.M - 1 + _ceil_log10(high)


def _ceil_log10(v: int) -> int:
    d = 0
    while 10 ** d < v:
        d += 1
    return d


# -- rendering and JSON ------------------------------------------------------------

def digit_row(art: CompiledArtifact, value: int) -> list[int]:
    high, digits = art.layout.split(value)
    return [high] + digits


def render_table(art: CompiledArtifact, names: Sequence[str] | None = None) -> str:
    """Plain-text digit table: one weight row and one profit row per item, then W and K."""
    names = names or [f"x{v + 1}" for v in range(len(art.layout.var_positions))]
    cols = art.layout.columns(names)
    width = max(len(c) for c in cols) + 1
    label_w = max(12, max(len(art.item_name(i, names)) for i in range(art.instance.n)) + 4)

    def fmt(label, row):
        return label.ljust(label_w) + "".join(str(d).rjust(width) for d in row)

    lines = [fmt("", cols)]
    for i, it in enumerate(art.instance.items):
        name = art.item_name(i, names)
        lines.append(fmt(f"w {name}", digit_row(art, it.weight)))
        lines.append(fmt(f"p {name}", digit_row(art, it.profit)))
    lines.append(fmt("W", digit_row(art, art.instance.capacity)))
    lines.append(fmt("K", digit_row(art, art.instance.goal)))
    return "\n".join(lines) + "\n"


def provenance_to_json(art: CompiledArtifact) -> dict:
    lay = art.layout
    return {
        "kind": art.kind,
        "items": [{"role": r, "index": k} for r, k in art.provenance],
        "layout": {
            "clauses": lay.n_clauses,
            "variables": [list(p) for p in lay.var_positions],
            "M": lay.M,
            "M_width": lay.M_width,
        },
    }


def artifact_from_json(instance: UmikInstance, prov: dict, source: QbfInstance | None = None):
    lay = prov["layout"]
    layout = DigitLayout(int(lay["clauses"]), tuple(tuple(p) for p in lay["variables"]),
                         int(lay["M"]), int(lay["M_width"]))
    items = tuple((d["role"], int(d["index"])) for d in prov["items"])
    if len(items) != instance.n:
        raise ShapeError("provenance does not cover every item")
    return CompiledArtifact(instance, layout, items, source, prov.get("kind", "umik"))


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"
