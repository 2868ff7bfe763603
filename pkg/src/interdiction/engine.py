"""Generic evaluator for alternating budgeted set-selection games.

Each level picks a subset of a ground set {0..n-1} under a budget. Chosen
sets are bitmasks; a game state is the tuple of masks of completed levels.
"""

from __future__ import annotations

import contextlib
import contextvars
import itertools
import time
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass

from .errors import BudgetExceeded, ShapeError
from .qbf import Role

GameState = tuple  # tuple[int, ...], one bitmask per completed level


@dataclass(frozen=True)
class Cardinality:
    limit: int

    def __post_init__(self):
        if self.limit < 0:
            raise ShapeError("budget limit must be nonnegative")


@dataclass(frozen=True)
class Weighted:
    costs: tuple
    limit: int

    def __post_init__(self):
        if self.limit < 0:
            raise ShapeError("budget limit must be nonnegative")
        if any(c < 0 for c in self.costs):
            raise ShapeError("costs must be nonnegative")


@dataclass(frozen=True)
class LevelSpec:
    """One decision level.

    `excludes` lists earlier level indices whose chosen elements are off
    limits here. `eligible` optionally restricts the selectable elements.
    `group` labels the level for compressed memo keys: levels sharing a
    group are represented by the union of their choices.
    """
    role: Role
    ground_set_size: int
    budget: Cardinality | Weighted
    excludes: tuple = ()
    eligible: int | None = None
    group: str | None = None

    def __post_init__(self):
        if self.ground_set_size < 0:
            raise ShapeError("ground set size must be nonnegative")
        if isinstance(self.budget, Weighted) and len(self.budget.costs) != self.ground_set_size:
            raise ShapeError("weighted budget needs one cost per element")


def to_mask(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << e
    return mask


def mask_elements(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# -- wall-clock budget ---------------------------------------------------------

_deadline: contextvars.ContextVar[float | None] = contextvars.ContextVar("deadline", default=None)


@contextlib.contextmanager
def time_budget(seconds: float | None):
    """Make every long-running search inside the block raise BudgetExceeded after `seconds`."""
    if seconds is None:
        yield
        return
    token = _deadline.set(time.monotonic() + seconds)
    try:
        yield
    finally:
        _deadline.reset(token)


def check_deadline():
    limit = _deadline.get()
    if limit is not None and time.monotonic() > limit:
        raise BudgetExceeded("wall-clock budget exhausted")


# -- enumeration ---------------------------------------------------------------

def available_elements(spec: LevelSpec, state: GameState) -> list[int]:
    blocked = 0
    for idx in spec.excludes:
        if idx < len(state):
            blocked |= state[idx]
    allowed = ((1 << spec.ground_set_size) - 1) & ~blocked
    if spec.eligible is not None:
        allowed &= spec.eligible
    if isinstance(spec.budget, Weighted):
        costs = spec.budget.costs
        return [e for e in mask_elements(allowed) if costs[e] <= spec.budget.limit]
    return mask_elements(allowed)


def feasible_sets(spec: LevelSpec, state: GameState = ()) -> Iterator[int]:
    """Budget-feasible choices by increasing cardinality, then lexicographically."""
    avail = available_elements(spec, state)
    budget = spec.budget
    if isinstance(budget, Cardinality):
        for r in range(min(budget.limit, len(avail)) + 1):
            for combo in itertools.combinations(avail, r):
                yield to_mask(combo)
        return
    costs = budget.costs
    cheapest = sorted(costs[e] for e in avail)
    for r in range(len(avail) + 1):
        if sum(cheapest[:r]) > budget.limit:
            return
        for combo in itertools.combinations(avail, r):
            if sum(costs[e] for e in combo) <= budget.limit:
                yield to_mask(combo)


def canonical_key(state: GameState, levels: Sequence[LevelSpec] | None = None,
                  compress: bool = False):
    """Memo key: the chosen sets themselves, or per-group unions when compressing."""
    if not compress or levels is None:
        return (len(state),) + tuple(state)
    unions: dict = {}
    for idx, mask in enumerate(state):
        group = levels[idx].group
        label = group if group is not None else f"#{idx}"
        unions[label] = unions.get(label, 0) | mask
    return (len(state),) + tuple(sorted(unions.items()))


def decide_alternating(levels: Sequence[LevelSpec], leaf: Callable[[GameState], bool],
                       prune: bool = True, compress: bool = False):
    """Evaluate the alternating game and return (decision, witness).

    The witness is the first winning top-level set in enumeration order
    (a frozenset of elements) when the top level is existential and the
    answer is yes; otherwise None. With `prune` off every feasible sequence
    is evaluated and nothing is memoized.
    """
    if not levels:
        raise ShapeError("at least one level is required")
    levels = list(levels)
    memo: dict = {}

    def value(state):
        check_deadline()
        depth = len(state)
        if depth == len(levels):
            return bool(leaf(state))
        if prune:
            key = canonical_key(state, levels, compress)
            hit = memo.get(key)
            if hit is not None:
                return hit
        spec = levels[depth]
        want = spec.role is Role.EXISTS
        if prune:
            result = not want
            for s in feasible_sets(spec, state):
                if value(state + (s,)) == want:
                    result = want
                    break
            memo[key] = result
            return result
        outcomes = [value(state + (s,)) for s in feasible_sets(spec, state)]
        return any(outcomes) if want else all(outcomes)

    top = levels[0]
    if top.role is Role.FORALL:
        return value(()), None
    witness = None
    for s in feasible_sets(top, ()):
        if value((s,)):
            if witness is None:
                witness = s
            if prune:
                break
    if witness is None:
        return False, None
    return True, frozenset(mask_elements(witness))
