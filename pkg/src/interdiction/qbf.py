"""Alternating quantified CNF formulas with at most three literals per clause.

Instances are immutable. The brute-force evaluator here is the ground truth
that every compiled game is checked against.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum

from .errors import ParseError, ShapeError


class Role(Enum):
    EXISTS = "e"
    FORALL = "a"

    def flipped(self) -> Role:
        return Role.FORALL if self is Role.EXISTS else Role.EXISTS


@dataclass(frozen=True, order=True)
class Literal:
    var: int
    negated: bool = False

    def __neg__(self) -> Literal:
        return Literal(self.var, not self.negated)

    def holds(self, value: bool) -> bool:
        return bool(value) != self.negated

    def to_int(self) -> int:
        return -(self.var + 1) if self.negated else self.var + 1

    @classmethod
    def from_int(cls, code: int) -> Literal:
        if code == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(code) - 1, code < 0)


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __post_init__(self):
        lits = self.literals
        if not 1 <= len(lits) <= 3:
            raise ShapeError(f"clause width must be 1..3, got {len(lits)}")
        if len(set(lits)) != len(lits):
            raise ShapeError("duplicate literal in clause")
        if len({lit.var for lit in lits}) != len(lits):
            raise ShapeError("tautological clause (complementary literals)")
        if list(lits) != sorted(lits):
            raise ShapeError("clause literals must be sorted; use Clause.of")

    @classmethod
    def of(cls, literals: Iterable[Literal | int]) -> Clause:
        """Normalize: drop repeated literals, reject complementary pairs, sort by variable."""
        lits = []
        for lit in literals:
            if not isinstance(lit, Literal):
                lit = Literal.from_int(lit)
            if lit not in lits:
                lits.append(lit)
        if len({lit.var for lit in lits}) != len(lits):
            raise ShapeError("tautological clause (complementary literals)")
        if len(lits) > 3:
            raise ShapeError(f"clause width {len(lits)} > 3")
        return cls(tuple(sorted(lits)))

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(lit.var for lit in self.literals)

    def holds(self, assignment: Sequence[bool]) -> bool:
        return any(lit.holds(assignment[lit.var]) for lit in self.literals)

    def contains(self, var: int, negated: bool) -> bool:
        return Literal(var, negated) in self.literals


@dataclass(frozen=True)
class QuantifierBlock:
    role: Role
    vars: tuple[int, ...]

    def __post_init__(self):
        if not self.vars:
            raise ShapeError("quantifier blocks must be nonempty")


@dataclass(frozen=True)
class QbfInstance:
    blocks: tuple[QuantifierBlock, ...]
    matrix: tuple[Clause, ...] = ()
    matrix_negated: bool = False

    def __post_init__(self):
        _check_prefix(self.blocks)
        if self.blocks[0].role is not Role.EXISTS:
            raise ShapeError("outermost block must be existential")
        n = self.num_vars
        for clause in self.matrix:
            for v in clause.variables:
                if not 0 <= v < n:
                    raise ShapeError(f"clause uses unquantified variable {v}")

    @property
    def num_vars(self) -> int:
        return sum(len(b.vars) for b in self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b.vars) for b in self.blocks)

    def variable_block(self, var: int) -> int:
        for i, b in enumerate(self.blocks):
            if var in b.vars:
                return i
        raise KeyError(var)

    def __str__(self):
        prefix = " ".join(
            ("E " if b.role is Role.EXISTS else "A ") + ",".join(f"x{v}" for v in b.vars)
            for b in self.blocks
        )
        body = " & ".join(
            "(" + " | ".join(("~" if l.negated else "") + f"x{l.var}" for l in c.literals) + ")"
            for c in self.matrix
        ) or "true"
        if self.matrix_negated:
            body = f"~[{body}]"
        return f"{prefix} : {body}"


def _check_prefix(blocks: Sequence[QuantifierBlock]):
    if not blocks:
        raise ShapeError("at least one quantifier block is required")
    for a, b in zip(blocks, blocks[1:]):
        if a.role is b.role:
            raise ShapeError("quantifier roles must alternate")
    seen = sorted(v for b in blocks for v in b.vars)
    if seen != list(range(len(seen))):
        raise ShapeError("blocks must partition the variables 0..n-1")


def make_instance(block_sizes: Sequence[int], clauses: Iterable[Iterable[int]],
                  matrix_negated: bool = False) -> QbfInstance:
    """Build an instance with consecutively numbered variables.

    Clauses use signed 1-based codes as in DIMACS.
    """
    blocks = []
    start = 0
    role = Role.EXISTS
    for size in block_sizes:
        blocks.append(QuantifierBlock(role, tuple(range(start, start + size))))
        start += size
        role = role.flipped()
    return QbfInstance(tuple(blocks), tuple(Clause.of(c) for c in clauses), matrix_negated)


def eval_matrix(instance: QbfInstance, assignment) -> bool:
    """Truth of the matrix under a full assignment, XOR the negation flag.

    `assignment` is a sequence indexed by variable or a mapping var -> value.
    """
    n = instance.num_vars
    if isinstance(assignment, Mapping):
        missing = [v for v in range(n) if v not in assignment]
        if missing:
            raise ShapeError(f"assignment misses variables {missing}")
        values = [bool(assignment[v]) for v in range(n)]
    else:
        if len(assignment) < n:
            raise ShapeError(f"assignment covers {len(assignment)} of {n} variables")
        values = [bool(x) for x in assignment]
    value = all(c.holds(values) for c in instance.matrix)
    return value != instance.matrix_negated


def quantified_value(prefix: Sequence[tuple[Role, Sequence[int]]],
                     matrix: Sequence[Clause], matrix_negated: bool = False) -> bool:
    """Game value of an arbitrary prefix (no outermost-role restriction).

    Variables are tried in prefix order, 0 before 1.
    """
    order = [(v, role) for role, vars_ in prefix for v in vars_]
    n = max((v for v, _ in order), default=-1) + 1
    values = [False] * n

    def leaf():
        return all(c.holds(values) for c in matrix) != matrix_negated

    def rec(i):
        if i == len(order):
            return leaf()
        v, role = order[i]
        if role is Role.EXISTS:
            for bit in (False, True):
                values[v] = bit
                if rec(i + 1):
                    return True
            return False
        for bit in (False, True):
            values[v] = bit
            if not rec(i + 1):
                return False
        return True

    return rec(0)


def qbf_decide(instance: QbfInstance) -> bool:
    return quantified_value([(b.role, b.vars) for b in instance.blocks],
                            instance.matrix, instance.matrix_negated)


def top_level_witness(instance: QbfInstance) -> tuple[bool, ...] | None:
    """Lexicographically smallest winning assignment of the outermost block, if any."""
    top = instance.blocks[0]
    rest = [(b.role, b.vars) for b in instance.blocks[1:]]
    for bits in itertools.product((False, True), repeat=len(top.vars)):
        fixed = dict(zip(top.vars, bits))
        matrix = _restrict(instance.matrix, fixed)
        if matrix is None:
            value = instance.matrix_negated
        else:
            value = quantified_value(rest, matrix, instance.matrix_negated)
        if value:
            return bits
    return None


def _restrict(matrix, fixed):
    """Simplify clauses under a partial assignment; None means some clause is falsified."""
    out = []
    for c in matrix:
        if any(l.var in fixed and l.holds(fixed[l.var]) for l in c.literals):
            continue
        rest = [l for l in c.literals if l.var not in fixed]
        if not rest:
            return None
        out.append(Clause(tuple(rest)))
    return out


# -- QDIMACS dialect ---------------------------------------------------------

NEGATED_MARK = "c negated-matrix"


def parse_qdimacs(text: str) -> QbfInstance:
    header = None
    negated = False
    blocks: list[QuantifierBlock] = []
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            if line == NEGATED_MARK:
                negated = True
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError(f"line {lineno}: negative header counts")
            continue
        if header is None:
            raise ParseError(f"line {lineno}: content before header")
        if line[0] in "ea":
            if tokens:
                raise ParseError(f"line {lineno}: quantifier line after clauses")
            role = Role(line[0])
            try:
                nums = [int(t) for t in line[1:].split()]
            except ValueError:
                raise ParseError(f"line {lineno}: bad quantifier line") from None
            if not nums or nums[-1] != 0 or 0 in nums[:-1] or len(nums) < 2:
                raise ParseError(f"line {lineno}: quantifier line must list variables and end with 0")
            if any(v < 0 or v > header[0] for v in nums[:-1]):
                raise ParseError(f"line {lineno}: variable out of range")
            if blocks and blocks[-1].role is role:
                raise ParseError(f"line {lineno}: quantifier blocks do not alternate")
            blocks.append(QuantifierBlock(role, tuple(v - 1 for v in nums[:-1])))
            continue
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError:
            raise ParseError(f"line {lineno}: bad clause line {line!r}") from None
    if header is None:
        raise ParseError("missing header")
    nvars, nclauses = header
    if tokens and tokens[-1] != 0:
        raise ParseError("last clause is not zero-terminated")
    raw_clauses: list[list[int]] = []
    current: list[int] = []
    for t in tokens:
        if t == 0:
            raw_clauses.append(current)
            current = []
        else:
            if abs(t) > nvars:
                raise ParseError(f"literal {t} exceeds variable count {nvars}")
            current.append(t)
    if len(raw_clauses) != nclauses:
        raise ParseError(f"header announces {nclauses} clauses, found {len(raw_clauses)}")
    if not blocks:
        raise ParseError("no quantifier blocks")
    if blocks[0].role is not Role.EXISTS:
        raise ParseError("outermost block must be existential")
    quantified = sorted(v for b in blocks for v in b.vars)
    if quantified != list(range(nvars)):
        dup = len(quantified) != len(set(quantified))
        raise ParseError("variable quantified twice" if dup else "unquantified variable")
    clauses = []
    for lits in raw_clauses:
        if not lits:
            raise ParseError("empty clause")
        try:
            clauses.append(Clause.of(lits))
        except ShapeError as exc:
            raise ParseError(str(exc)) from None
    return QbfInstance(tuple(blocks), tuple(clauses), negated)


def emit_qdimacs(instance: QbfInstance) -> str:
    lines = [f"p cnf {instance.num_vars} {len(instance.matrix)}"]
    if instance.matrix_negated:
        lines.append(NEGATED_MARK)
    for b in instance.blocks:
        lines.append(b.role.value + " " + " ".join(str(v + 1) for v in b.vars) + " 0")
    for c in instance.matrix:
        lines.append(" ".join(str(l.to_int()) for l in c.literals) + " 0")
    return "\n".join(lines) + "\n"


# -- generation --------------------------------------------------------------

def valid_clauses(num_vars: int) -> list[Clause]:
    """Every normalized clause of width 1..3 over the first `num_vars` variables."""
    out = []
    for width in (1, 2, 3):
        for vars_ in itertools.combinations(range(num_vars), width):
            for signs in itertools.product((False, True), repeat=width):
                out.append(Clause(tuple(Literal(v, s) for v, s in zip(vars_, signs))))
    return out


def random_qbf(seed, block_sizes: Sequence[int], clause_count: int,
               matrix_negated: bool = False) -> QbfInstance:
    """Formula with `clause_count` distinct clauses drawn uniformly from `valid_clauses`."""
    if not block_sizes:
        raise ShapeError("block_sizes must be nonempty")
    if any(s < 1 for s in block_sizes):
        raise ShapeError("block sizes must be positive")
    if clause_count < 0:
        raise ShapeError("clause_count must be nonnegative")
    rng = random.Random(seed)
    pool = valid_clauses(sum(block_sizes))
    if clause_count > len(pool):
        raise ShapeError(f"only {len(pool)} distinct clauses exist over {sum(block_sizes)} variables")
    clauses = rng.sample(pool, clause_count)
    return make_instance(block_sizes, [[l.to_int() for l in c.literals] for c in clauses],
                         matrix_negated)


def enumerate_formulas(block_sizes: Sequence[int], max_clauses: int,
                       matrix_negated: bool = False, min_clauses: int = 1) -> Iterator[QbfInstance]:
    """All formulas whose matrix is a set of distinct normalized clauses.

    Matrices are yielded in canonical (combination) order, smaller ones first.
    """
    pool = valid_clauses(sum(block_sizes))
    for count in range(min_clauses, max_clauses + 1):
        for combo in itertools.combinations(pool, count):
            yield make_instance(block_sizes, [[l.to_int() for l in c.literals] for c in combo],
                                matrix_negated)
