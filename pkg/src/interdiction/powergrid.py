"""DC power-flow load shedding and the line fortification game.

Lines carry (angle difference)/reactance unless attacked. After an attack the
operator re-dispatches generators inside their ramp windows and sheds as
little demand as possible; the shed is computed exactly with the Fraction
simplex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import simplex
from .engine import Cardinality, LevelSpec, Weighted, decide_alternating, to_mask
from .errors import ParseError, ShapeError, SizeLimitError
from .knapsack import UmikInstance
from .qbf import Role

MAX_LINES = 20


@dataclass(frozen=True)
class Generator:
    bus: int
    output0: Fraction
    ramp_down: Fraction
    ramp_up: Fraction
    capacity: Fraction

    def window(self):
        lo = max(Fraction(0), self.output0 - self.ramp_down)
        hi = min(self.capacity, self.output0 + self.ramp_up)
        return lo, hi


@dataclass(frozen=True)
class Line:
    origin: int
    dest: int
    capacity: Fraction
    reactance: Fraction
    attack_weight: int
    fortify_weight: int = 1


@dataclass(frozen=True)
class GridInstance:
    demands: tuple          # per bus
    generators: tuple
    lines: tuple
    fortify_budget: int
    attack_budget: int
    shed_goal: Fraction

    def __post_init__(self):
        nb = len(self.demands)
        if any(d < 0 for d in self.demands):
            raise ShapeError("demands must be nonnegative")
        for g in self.generators:
            if not 0 <= g.bus < nb:
                raise ShapeError(f"generator bus {g.bus} out of range")
            if min(g.output0, g.ramp_down, g.ramp_up, g.capacity) < 0:
                raise ShapeError("generator parameters must be nonnegative")
            lo, hi = g.window()
            if lo > hi:
                raise ShapeError("ramp window misses the capacity range")
        for ln in self.lines:
            if not (0 <= ln.origin < nb and 0 <= ln.dest < nb) or ln.origin == ln.dest:
                raise ShapeError(f"line {ln.origin}->{ln.dest} is not between two distinct buses")
            if ln.reactance <= 0:
                raise ShapeError("reactances must be positive")
            if ln.capacity < 0 or ln.attack_weight < 0 or ln.fortify_weight < 0:
                raise ShapeError("line parameters must be nonnegative")
        if self.fortify_budget < 0 or self.attack_budget < 0 or self.shed_goal < 0:
            raise ShapeError("budgets and goal must be nonnegative")

    @property
    def num_buses(self) -> int:
        return len(self.demands)


@dataclass(frozen=True)
class DispatchResult:
    total_shed: Fraction
    flows: tuple
    outputs: tuple
    shed: tuple
    angles: tuple
    dual_objective: Fraction


def min_load_shed(grid: GridInstance, attacked=(), reference: int | None = None) -> DispatchResult:
    """Least total uncovered demand once the `attacked` lines (indices or mask) carry no flow.

    Angles are pinned to 0 at `reference` (default: the first generator's bus).
    """
    mask = attacked if isinstance(attacked, int) else to_mask(attacked)
    if mask >> len(grid.lines):
        raise ShapeError("attacked line index out of range")
    nb = grid.num_buses
    gens = grid.generators
    if reference is None:
        reference = gens[0].bus if gens else 0
    live = [l for l in range(len(grid.lines)) if not mask >> l & 1]
    angle_buses = [b for b in range(nb) if b != reference]
    # variable layout: shifted generator outputs | shed per bus | angle+ | angle-
    ng = len(gens)
    n_ang = len(angle_buses)
    nvar = ng + nb + 2 * n_ang
    col_pos = {b: ng + nb + k for k, b in enumerate(angle_buses)}

    def angle_terms(bus, coef, row):
        if bus in col_pos:
            row[col_pos[bus]] += coef
            row[col_pos[bus] + n_ang] -= coef

    windows = [g.window() for g in gens]
    a_eq, b_eq = [], []
    for n in range(nb):
        row = [Fraction(0)] * nvar
        rhs = Fraction(grid.demands[n])
        for j, g in enumerate(gens):
            if g.bus == n:
                row[j] += 1
                rhs -= windows[j][0]
        row[ng + n] += 1
        for l in live:
            ln = grid.lines[l]
            susceptance = 1 / Fraction(ln.reactance)
            # flow leaves the origin and enters the destination
            sign = -1 if ln.origin == n else 1 if ln.dest == n else 0
            if sign:
                angle_terms(ln.origin, sign * susceptance, row)
                angle_terms(ln.dest, -sign * susceptance, row)
        a_eq.append(row)
        b_eq.append(rhs)
    a_ub, b_ub = [], []
    for j in range(ng):
        row = [Fraction(0)] * nvar
        row[j] = Fraction(1)
        a_ub.append(row)
        b_ub.append(windows[j][1] - windows[j][0])
    for n in range(nb):
        row = [Fraction(0)] * nvar
        row[ng + n] = Fraction(1)
        a_ub.append(row)
        b_ub.append(Fraction(grid.demands[n]))
    for l in live:
        ln = grid.lines[l]
        susceptance = 1 / Fraction(ln.reactance)
        for sign in (1, -1):
            row = [Fraction(0)] * nvar
            angle_terms(ln.origin, sign * susceptance, row)
            angle_terms(ln.dest, -sign * susceptance, row)
            a_ub.append(row)
            b_ub.append(Fraction(ln.capacity))
    cost = [Fraction(0)] * ng + [Fraction(1)] * nb + [Fraction(0)] * (2 * n_ang)
    res = simplex.solve_lp(cost, a_ub, b_ub, a_eq, b_eq)
    if res.status != simplex.OPTIMAL:
        raise ArithmeticError(f"dispatch model is {res.status}")
    if res.objective != res.dual_objective or not simplex.dual_feasible(res, cost, a_ub, a_eq):
        raise ArithmeticError("strong duality check failed")
    x = res.x
    angles = []
    for b in range(nb):
        angles.append(x[col_pos[b]] - x[col_pos[b] + n_ang] if b in col_pos else Fraction(0))
    flows = []
    for l, ln in enumerate(grid.lines):
        if mask >> l & 1:
            flows.append(Fraction(0))
        else:
            flows.append((angles[ln.origin] - angles[ln.dest]) / Fraction(ln.reactance))
    outputs = tuple(windows[j][0] + x[j] for j in range(ng))
    return DispatchResult(res.objective, tuple(flows), outputs, tuple(x[ng:ng + nb]), tuple(angles),
                          res.dual_objective)


def star_shed_closed_form(grid: GridInstance, attacked=()) -> Fraction:
    """Shed of a compiled star grid: the demand of every bus whose line is attacked."""
    if len(grid.generators) != 1:
        raise ShapeError("star grid needs exactly one generator")
    gen = grid.generators[0]
    total = sum(Fraction(d) for d in grid.demands)
    if gen.ramp_up != 0 or gen.ramp_down != total or grid.demands[gen.bus] != 0:
        raise ShapeError("generator does not match the star shape")
    leaves = set()
    for ln in grid.lines:
        if ln.origin != gen.bus or ln.capacity != grid.demands[ln.dest] or ln.dest in leaves:
            raise ShapeError("lines do not match the star shape")
        leaves.add(ln.dest)
    if len(leaves) != grid.num_buses - 1:
        raise ShapeError("every non-generator bus needs its own line")
    mask = attacked if isinstance(attacked, int) else to_mask(attacked)
    return sum((Fraction(grid.demands[ln.dest]) for l, ln in enumerate(grid.lines) if mask >> l & 1),
               Fraction(0))


def tepgfu_levels(grid: GridInstance, restrict: bool = True) -> list[LevelSpec]:
    nl = len(grid.lines)
    weights = tuple(ln.attack_weight for ln in grid.lines)
    kweights = tuple(ln.fortify_weight for ln in grid.lines)
    if all(k == 1 for k in kweights):
        fort_budget = Cardinality(grid.fortify_budget)
    else:
        fort_budget = Weighted(kweights, grid.fortify_budget)
    useful = to_mask(l for l, w in enumerate(weights) if w <= grid.attack_budget) if restrict else None
    return [
        LevelSpec(Role.EXISTS, nl, fort_budget, eligible=useful, group="fortify"),
        LevelSpec(Role.FORALL, nl, Weighted(weights, grid.attack_budget), excludes=(0,), group="attack"),
    ]


def tepgfu_decide(grid: GridInstance, prune: bool = True, on_solve=None):
    """Can fortification keep the shed at or below the goal against every affordable attack?

    `on_solve(attacked_mask, DispatchResult)` sees every distinct dispatch solve.
    """
    if len(grid.lines) > MAX_LINES:
        raise SizeLimitError(f"{len(grid.lines)} lines exceed the limit of {MAX_LINES}")
    cache = {}

    def leaf(state):
        attacked = state[1]
        if attacked not in cache:
            result = min_load_shed(grid, attacked)
            if on_solve is not None:
                on_solve(attacked, result)
            cache[attacked] = result.total_shed
        return cache[attacked] <= grid.shed_goal

    return decide_alternating(tepgfu_levels(grid, restrict=prune), leaf, prune=prune, compress=True)


def compile_ubik_to_tepgfu(u: UmikInstance):
    """Star grid: one generator bus feeding one demand bus per item.

    Returns (GridInstance, bus names).
    """
    if u.m != 1:
        raise ShapeError("needs a one-round (UBIK) instance")
    if u.goal == 0:
        raise ShapeError("goal 0 would give a negative shed goal")
    if u.n == 0:
        raise ShapeError("needs at least one item")
    total = sum(it.profit for it in u.items)
    if total == 0:
        raise ShapeError("needs a positive total profit")
    reactance = Fraction(1, 2 * total)
    gen = Generator(0, Fraction(total), Fraction(total), Fraction(0), Fraction(total))
    lines = tuple(Line(0, i, Fraction(it.profit), reactance, it.weight) for i, it in enumerate(u.items, 1))
    demands = (Fraction(0),) + tuple(Fraction(it.profit) for it in u.items)
    grid = GridInstance(demands, (gen,), lines, u.budget(2), u.capacity, Fraction(u.goal - 1))
    names = ("g",) + tuple(f"b{i}" for i in range(1, u.n + 1))
    return grid, names


# -- I/O -----------------------------------------------------------------------

def grid_to_json(grid: GridInstance) -> dict:
    return {
        "game": "tepgfu",
        "demands": [str(d) for d in grid.demands],
        "generators": [{"bus": g.bus, "p0": str(g.output0), "rd": str(g.ramp_down),
                        "ru": str(g.ramp_up), "pmax": str(g.capacity)} for g in grid.generators],
        "lines": [{"from": ln.origin, "to": ln.dest, "cap": str(ln.capacity), "x": str(ln.reactance),
                   "z": str(ln.attack_weight), "k": str(ln.fortify_weight)} for ln in grid.lines],
        "K": grid.fortify_budget,
        "Z": str(grid.attack_budget),
        "goal": str(grid.shed_goal),
    }


def grid_from_json(data: dict) -> GridInstance:
    try:
        gens = tuple(Generator(int(g["bus"]), Fraction(g["p0"]), Fraction(g["rd"]), Fraction(g["ru"]),
                               Fraction(g["pmax"])) for g in data["generators"])
        lines = tuple(Line(int(d["from"]), int(d["to"]), Fraction(d["cap"]), Fraction(d["x"]),
                           int(d["z"]), int(d.get("k", 1))) for d in data["lines"])
        return GridInstance(tuple(Fraction(d) for d in data["demands"]), gens, lines, int(data["K"]),
                            int(data["Z"]), Fraction(data["goal"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed grid instance: {exc}") from None


def grid_dot(grid: GridInstance, fortified=(), attacked=()) -> str:
    lines = ["graph grid {"]
    gen_buses = {g.bus for g in grid.generators}
    for b, d in enumerate(grid.demands):
        shape = "box" if b in gen_buses else "ellipse"
        lines.append(f'  b{b} [label="b{b}\\nd={d}", shape={shape}];')
    for l, ln in enumerate(grid.lines):
        style = ""
        if l in fortified:
            style = ", color=blue, penwidth=2"
        elif l in attacked:
            style = ", color=red, style=dashed"
        lines.append(f'  b{ln.origin} -- b{ln.dest} [label="cap={ln.capacity} z={ln.attack_weight}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"

