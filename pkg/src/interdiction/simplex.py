"""Exact two-phase simplex over Fractions with Bland's anti-cycling rule.

Solves  min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
and reports primal values, the dual vector of the final basis and the dual
objective, so callers can check strong duality exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpResult:
    status: str
    x: list | None = None
    objective: Fraction | None = None
    duals: list | None = None          # one per constraint row, ub rows first
    dual_objective: Fraction | None = None


def _frac_row(row):
    return [Fraction(v) for v in row]


def solve_lp(c, a_ub=(), b_ub=(), a_eq=(), b_eq=()) -> LpResult:
    c = _frac_row(c)
    nvar = len(c)
    rows = [(_frac_row(r), Fraction(b), True) for r, b in zip(a_ub, b_ub)]
    rows += [(_frac_row(r), Fraction(b), False) for r, b in zip(a_eq, b_eq)]
    for r, _, _ in rows:
        if len(r) != nvar:
            raise ValueError("constraint row length does not match the cost vector")
    nslack = sum(1 for _, _, ub in rows if ub)
    m = len(rows)
    # columns: originals | slacks | artificials ; last entry is the rhs
    width = nvar + nslack + m
    tab = []
    signs = []
    slack_col = nvar
    for i, (r, b, ub) in enumerate(rows):
        line = r + [Fraction(0)] * (nslack + m) + [b]
        if ub:
            line[slack_col] = Fraction(1)
            slack_col += 1
        sign = 1
        if b < 0:
            line = [-v for v in line]
            sign = -1
        line[nvar + nslack + i] = Fraction(1)
        tab.append(line)
        signs.append(sign)
    basis = [nvar + nslack + i for i in range(m)]
    art_start = nvar + nslack

    def pivot(row, col):
        p = tab[row][col]
        if p != 1:
            tab[row] = [v / p for v in tab[row]]
        prow = tab[row]
        for i in range(m):
            if i != row:
                f = tab[i][col]
                if f:
                    tab[i] = [a - f * b for a, b in zip(tab[i], prow)]
        basis[row] = col

    def run(cost, allowed):
        """Minimize cost over the current basis; Bland's rule on both choices."""
        while True:
            cb = [cost[b] for b in basis]
            enter = None
            for j in range(allowed):
                if j in basis:
                    continue
                reduced = cost[j] - sum(cb[i] * tab[i][j] for i in range(m) if tab[i][j])
                if reduced < 0:
                    enter = j
                    break
            if enter is None:
                return True
            leave, best = None, None
            for i in range(m):
                a = tab[i][enter]
                if a > 0:
                    ratio = tab[i][-1] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        leave, best = i, ratio
            if leave is None:
                return False
            pivot(leave, enter)

    phase1 = [Fraction(0)] * art_start + [Fraction(1)] * m
    run(phase1, width)
    if sum(tab[i][-1] for i in range(m) if basis[i] >= art_start) != 0:
        return LpResult(INFEASIBLE)
    # push zero-valued artificials out where a real column can replace them
    for i in range(m):
        if basis[i] >= art_start:
            for j in range(art_start):
                if tab[i][j] != 0 and j not in basis:
                    pivot(i, j)
                    break
    phase2 = c + [Fraction(0)] * (nslack + m)
    if not run(phase2, art_start):
        return LpResult(UNBOUNDED)

    x = [Fraction(0)] * nvar
    for i, b in enumerate(basis):
        if b < nvar:
            x[b] = tab[i][-1]
    objective = sum(ci * xi for ci, xi in zip(c, x))
    # the artificial block of the tableau holds the inverse of the basis matrix
    cb = [phase2[b] for b in basis]
    duals = []
    for k in range(m):
        y = sum(cb[i] * tab[i][art_start + k] for i in range(m))
        duals.append(y * signs[k])
    rhs = [b for _, b, _ in rows]
    dual_objective = sum(y * b for y, b in zip(duals, rhs))
    return LpResult(OPTIMAL, x, objective, duals, dual_objective)


def dual_feasible(result: LpResult, c, a_ub=(), a_eq=()) -> bool:
    """Check the reported duals against the dual of the minimization form."""
    rows = [list(r) for r in a_ub] + [list(r) for r in a_eq]
    n_ub = len(a_ub)
    y = result.duals
    if any(y[k] > 0 for k in range(n_ub)):
        return False
    for j in range(len(c)):
        if Fraction(c[j]) - sum(y[k] * Fraction(rows[k][j]) for k in range(len(rows))) < 0:
            return False
    return True
