"""Exact rational two-phase simplex (Bland's rule, dense tableau).

Solves   max c.x   s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
entirely in fractions.Fraction. Desk-scale dimensions only; everything is
kept simple and auditable rather than fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

F = Fraction


class SimplexError(RuntimeError):
    pass


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction]
    objective: Fraction
    #: dual value per constraint row, ub rows first then eq rows
    duals: list[Fraction]
    #: reduced cost per original variable (c_j - z_j; <= 0 at a max optimum)
    reduced_costs: list[Fraction]


def solve_lp(c: Sequence[Fraction],
             a_ub: Sequence[Sequence[Fraction]] = (),
             b_ub: Sequence[Fraction] = (),
             a_eq: Sequence[Sequence[Fraction]] = (),
             b_eq: Sequence[Fraction] = ()) -> LpSolution:
    nvar = len(c)
    c = [F(v) for v in c]

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    row_sign: list[int] = []  # -1 when the original row was negated
    is_ub_row: list[bool] = []
    for a, b in zip(a_ub, b_ub):
        rows.append([F(v) for v in a])
        rhs.append(F(b))
        row_sign.append(1)
        is_ub_row.append(True)
    for a, b in zip(a_eq, b_eq):
        rows.append([F(v) for v in a])
        rhs.append(F(b))
        row_sign.append(1)
        is_ub_row.append(False)
    nrow = len(rows)

    # Normalize to b >= 0 so the initial basis is feasible.
    for i in range(nrow):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            row_sign[i] = -1

    # Column layout: [original | slack/surplus per ub row | artificials].
    slack_col: dict[int, int] = {}
    ncol = nvar
    for i in range(nrow):
        if is_ub_row[i]:
            slack_col[i] = ncol
            ncol += 1
    art_col: dict[int, int] = {}
    for i in range(nrow):
        # ub rows that were negated have a surplus slack (-1 after negation),
        # which cannot serve as the initial basic column.
        if not is_ub_row[i] or row_sign[i] < 0:
            art_col[i] = ncol
            ncol += 1

    tab = [[F(0)] * (ncol + 1) for _ in range(nrow)]
    basis = [0] * nrow
    for i in range(nrow):
        for j in range(nvar):
            tab[i][j] = rows[i][j]
        if i in slack_col:
            tab[i][slack_col[i]] = F(row_sign[i])
        if i in art_col:
            tab[i][art_col[i]] = F(1)
            basis[i] = art_col[i]
        else:
            basis[i] = slack_col[i]
        tab[i][ncol] = rhs[i]

    artificial = set(art_col.values())

    def pivot(r: int, col: int):
        piv = tab[r][col]
        tab[r] = [v / piv for v in tab[r]]
        for i in range(nrow):
            if i != r and tab[i][col] != 0:
                f = tab[i][col]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[r])]
        basis[r] = col

    def reduced_costs(obj: list[Fraction]) -> list[Fraction]:
        rc = list(obj)
        for i in range(nrow):
            cb = obj[basis[i]]
            if cb != 0:
                for j in range(ncol):
                    rc[j] -= cb * tab[i][j]
        return rc

    def run_phase(obj: list[Fraction], blocked: set[int]):
        while True:
            rc = reduced_costs(obj)
            enter = -1
            for j in range(ncol):  # Bland: smallest eligible index
                if j not in blocked and basis_free(j) and rc[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return
            leave, best = -1, None
            for i in range(nrow):
                if tab[i][enter] > 0:
                    ratio = tab[i][ncol] / tab[i][enter]
                    if best is None or ratio < best or (
                            ratio == best and basis[i] < basis[leave]):
                        leave, best = i, ratio
            if leave < 0:
                raise SimplexError("unbounded")
            pivot(leave, enter)

    def basis_free(j: int) -> bool:
        return j not in basis_set()

    def basis_set() -> set[int]:
        return set(basis)

    # Phase 1: drive artificials to zero.
    if artificial:
        obj1 = [F(0)] * ncol
        for j in artificial:
            obj1[j] = F(-1)
        run_phase(obj1, blocked=set())
        if any(tab[i][ncol] != 0 and basis[i] in artificial
               for i in range(nrow)):
            return LpSolution("infeasible", [], F(0), [], [])
        # Remove artificials still basic at zero where possible.
        for i in range(nrow):
            if basis[i] in artificial:
                for j in range(ncol):
                    if j not in artificial and tab[i][j] != 0:
                        pivot(i, j)
                        break

    # Phase 2.
    obj2 = [F(0)] * ncol
    for j in range(nvar):
        obj2[j] = c[j]
    try:
        run_phase(obj2, blocked=artificial)
    except SimplexError:
        return LpSolution("unbounded", [], F(0), [], [])

    x = [F(0)] * nvar
    for i in range(nrow):
        if basis[i] < nvar:
            x[basis[i]] = tab[i][ncol]
    objective = sum((c[j] * x[j] for j in range(nvar)), F(0))

    # Duals: y = c_B B^{-1}, read off the initial identity columns.
    duals = [F(0)] * nrow
    for i in range(nrow):
        col = art_col.get(i, slack_col.get(i))
        y = sum((obj2[basis[r]] * tab[r][col] for r in range(nrow)), F(0))
        # negated rows flip the sign of the original constraint's dual
        duals[i] = y * row_sign[i]

    rc = reduced_costs(obj2)
    return LpSolution("optimal", x, objective, duals, rc[:nvar])
