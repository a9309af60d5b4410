"""Dense two-phase primal simplex with Bland's rule.

Deterministic minimiser for small LPs, used as the independent optimisation
route behind the enumeration oracle and for cross-checks.  General variable
bounds are supported: finite lower bounds are shifted out, upper bounds become
explicit rows, and doubly-free variables are split.  Instances whose
standardised tableau exceeds ROW_GUARD rows are rejected rather than solved
slowly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-9
ROW_GUARD = 2500


class SimplexError(RuntimeError):
    """Numerical failure or misuse of the dense solver; never silent."""


class SimplexGuardError(SimplexError):
    """Instance too large for the dense tableau."""


@dataclass
class LpProblem:
    """minimise c.x subject to A x (<=,=,>=) rhs and lower <= x <= upper."""

    c: np.ndarray
    a: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.a = np.asarray(self.a, dtype=float).reshape(len(self.senses), -1) if len(self.senses) \
            else np.zeros((0, len(self.c)))
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        m, n = self.a.shape
        if not (len(self.c) == n == len(self.lower) == len(self.upper)):
            raise ValueError("inconsistent column dimensions")
        if not (m == len(self.senses) == len(self.rhs)):
            raise ValueError("inconsistent row dimensions")
        for s in self.senses:
            if s not in ("LE", "EQ", "GE"):
                raise ValueError(f"bad sense {s!r}")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound above upper bound")


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded
    x: np.ndarray | None
    objective: float | None
    iterations: int
    max_residual: float


def _bland_pivot(tableau: np.ndarray, basis: np.ndarray, cost_row: np.ndarray,
                 tol: float, max_iter: int) -> tuple[str, int]:
    """Pivot until optimal or unbounded.  Entering: lowest-index negative reduced
    cost; leaving: min ratio, ties to the lowest basis variable index."""
    m = tableau.shape[0]
    iterations = 0
    while True:
        entering = -1
        for j in range(len(cost_row) - 1):
            if cost_row[j] < -tol:
                entering = j
                break
        if entering < 0:
            return "optimal", iterations
        col = tableau[:, entering]
        best_ratio = math.inf
        leave = -1
        for r in range(m):
            if col[r] > tol:
                ratio = tableau[r, -1] / col[r]
                if ratio < best_ratio - tol or (abs(ratio - best_ratio) <= tol
                                                and (leave < 0 or basis[r] < basis[leave])):
                    best_ratio = ratio
                    leave = r
        if leave < 0:
            return "unbounded", iterations
        iterations += 1
        if iterations > max_iter:
            raise SimplexError(f"iteration limit {max_iter} exceeded")
        pivot = tableau[leave, entering]
        tableau[leave, :] /= pivot
        for r in range(m):
            if r != leave and tableau[r, entering] != 0.0:
                tableau[r, :] -= tableau[r, entering] * tableau[leave, :]
        cost_row -= cost_row[entering] * tableau[leave, :]
        basis[leave] = entering


def solve_dense_lp(problem: LpProblem, *, tol: float = FEAS_TOL,
                   max_iter: int | None = None) -> LpResult:
    c0 = problem.c.copy()
    a0 = problem.a.copy()
    rhs0 = problem.rhs.copy()
    lower = problem.lower
    upper = problem.upper
    m0, n0 = a0.shape

    # standardise columns: shift/negate/split so every working variable is >= 0
    cols: list[np.ndarray] = []
    costs: list[float] = []
    upper_rows: list[tuple[int, float]] = []  # (standard column, bound)
    recover: list[tuple[str, int, float]] = []  # (mode, std column, offset)
    const = 0.0
    b = rhs0.copy()
    for jorig in range(n0):
        lo, up = lower[jorig], upper[jorig]
        col = a0[:, jorig]
        if lo == -math.inf and up == math.inf:
            cols.append(col)
            costs.append(c0[jorig])
            plus = len(cols) - 1
            cols.append(-col)
            costs.append(-c0[jorig])
            recover.append(("split", plus, 0.0))
        elif lo == -math.inf:
            # x = up - u with u >= 0
            b = b - col * up
            const += c0[jorig] * up
            cols.append(-col)
            costs.append(-c0[jorig])
            recover.append(("neg", len(cols) - 1, up))
        else:
            # x = lo + u with u >= 0
            if lo != 0.0:
                b = b - col * lo
                const += c0[jorig] * lo
            cols.append(col)
            costs.append(c0[jorig])
            recover.append(("shift", len(cols) - 1, lo))
            if up != math.inf:
                upper_rows.append((len(cols) - 1, up - lo))

    n_std = len(cols)
    m = m0 + len(upper_rows)
    if m > ROW_GUARD:
        raise SimplexGuardError(f"{m} rows exceeds dense guard of {ROW_GUARD}")

    a = np.zeros((m, n_std))
    if n_std:
        a[:m0, :] = np.column_stack(cols) if cols else np.zeros((m0, 0))
    senses = list(problem.senses)
    b = np.concatenate([b, np.zeros(len(upper_rows))])
    for extra, (jstd, bound) in enumerate(upper_rows):
        a[m0 + extra, jstd] = 1.0
        senses.append("LE")
        b[m0 + extra] = bound

    # append slack/surplus columns, flip rows negative rhs, add artificials
    slack_sign = {"LE": 1.0, "GE": -1.0, "EQ": 0.0}
    n_slack = sum(1 for s in senses if s != "EQ")
    width = n_std + n_slack
    full = np.zeros((m, width + 1))
    full[:, :n_std] = a
    full[:, -1] = b
    scol = n_std
    slack_of_row = {}
    for r, s in enumerate(senses):
        if s != "EQ":
            full[r, scol] = slack_sign[s]
            slack_of_row[r] = scol
            scol += 1
    for r in range(m):
        if full[r, -1] < 0.0:
            full[r, :] = -full[r, :]

    basis = np.full(m, -1, dtype=int)
    art_rows = []
    for r in range(m):
        jslack = slack_of_row.get(r)
        if jslack is not None and full[r, jslack] == 1.0:
            basis[r] = jslack
        else:
            art_rows.append(r)
    n_art = len(art_rows)
    tableau = np.zeros((m, width + n_art + 1))
    tableau[:, :width] = full[:, :width]
    tableau[:, -1] = full[:, -1]
    for idx, r in enumerate(art_rows):
        tableau[r, width + idx] = 1.0
        basis[r] = width + idx

    max_iter = max_iter if max_iter is not None else 200 * (m + width) + 2000

    # phase 1: minimise the artificial sum
    if n_art:
        phase1 = np.zeros(tableau.shape[1])
        for r in art_rows:
            phase1 -= tableau[r, :]
        phase1[width:width + n_art] = 0.0
        status, it1 = _bland_pivot(tableau, basis, phase1, tol, max_iter)
        if status == "unbounded":
            raise SimplexError("phase 1 unbounded; inconsistent standardisation")
        rhs_scale = float(np.max(np.abs(tableau[:, -1]))) if m else 0.0
        if -phase1[-1] > tol * max(100.0, rhs_scale):
            return LpResult("infeasible", None, None, it1, math.inf)
        # drive leftover artificials out of the basis
        drop_rows = []
        for r in range(m):
            if basis[r] >= width:
                pivot_col = next((j for j in range(width) if abs(tableau[r, j]) > tol), None)
                if pivot_col is None:
                    drop_rows.append(r)
                    continue
                pivot = tableau[r, pivot_col]
                tableau[r, :] /= pivot
                for rr in range(m):
                    if rr != r and tableau[rr, pivot_col] != 0.0:
                        tableau[rr, :] -= tableau[rr, pivot_col] * tableau[r, :]
                basis[r] = pivot_col
        if drop_rows:
            keep = [r for r in range(m) if r not in set(drop_rows)]
            tableau = tableau[keep, :]
            basis = basis[keep]
            m = len(keep)
    else:
        it1 = 0

    tableau = np.delete(tableau, np.s_[width:width + n_art], axis=1)

    # phase 2 reduced costs for the original objective
    cost = np.zeros(tableau.shape[1])
    cost[:n_std] = np.asarray(costs)
    cost_row = cost.copy()
    for r in range(m):
        if cost[basis[r]] != 0.0:
            cost_row -= cost[basis[r]] * tableau[r, :]
    status, it2 = _bland_pivot(tableau, basis, cost_row, tol, max_iter)
    if status == "unbounded":
        return LpResult("unbounded", None, None, it1 + it2, math.inf)

    xstd = np.zeros(width)
    for r in range(m):
        if basis[r] < width:
            xstd[basis[r]] = tableau[r, -1]
    x = np.zeros(n0)
    for jorig, (mode, jstd, offset) in enumerate(recover):
        if mode == "shift":
            x[jorig] = offset + xstd[jstd]
        elif mode == "neg":
            x[jorig] = offset - xstd[jstd]
        else:
            x[jorig] = xstd[jstd] - xstd[jstd + 1]

    objective = float(np.dot(c0, x))
    residual = _primal_residual(problem, x)
    if residual > 1e-6:
        raise SimplexError(f"numerical failure: primal residual {residual:.3e}")
    return LpResult("optimal", x, objective, it1 + it2, residual)


def _primal_residual(problem: LpProblem, x: np.ndarray) -> float:
    worst = 0.0
    if problem.a.shape[0]:
        ax = problem.a @ x
        for r, s in enumerate(problem.senses):
            gap = ax[r] - problem.rhs[r]
            if s == "EQ":
                worst = max(worst, abs(gap))
            elif s == "LE":
                worst = max(worst, gap)
            else:
                worst = max(worst, -gap)
    lo_violation = np.maximum(problem.lower - x, 0.0)
    up_violation = np.maximum(x - problem.upper, 0.0)
    finite_lo = np.where(np.isfinite(problem.lower), lo_violation, 0.0)
    finite_up = np.where(np.isfinite(problem.upper), up_violation, 0.0)
    if len(x):
        worst = max(worst, float(np.max(finite_lo)), float(np.max(finite_up)))
    return worst
