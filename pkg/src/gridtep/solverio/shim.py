"""Command-line MPS solve adapter.

Reads an MPS file, solves it with the requested engine, and writes a plain
name/value solution file: one ``<column> <value>`` line per variable, preceded
by ``=status=``, ``=objective=`` and ``=bound=`` metadata lines (readers that
only understand name/value pairs can ignore them).

Engines:
  highs  HiGHS branch-and-cut via scipy.optimize.milp (default)
  glpk   GNU GLPK via cvxopt.glpk.ilp
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .mpsread import MpsProblem, read_mps


def _solve_highs(problem: MpsProblem, time_limit: float, gap: float):
    import numpy as np
    from scipy import sparse
    from scipy.optimize import Bounds, LinearConstraint, milp

    c, rows, senses, rhs, lower, upper, is_int = problem.to_arrays()
    n = len(c)
    data, ri, ci = [], [], []
    for r, row in enumerate(rows):
        for j, coeff in row.items():
            ri.append(r)
            ci.append(j)
            data.append(coeff)
    lb = [(-math.inf if s == "LE" else v) for s, v in zip(senses, rhs)]
    ub = [(math.inf if s == "GE" else v) for s, v in zip(senses, rhs)]
    constraints = []
    if rows:
        a = sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), n))
        constraints = [LinearConstraint(a, lb, ub)]
    res = milp(
        c=np.asarray(c),
        constraints=constraints,
        integrality=np.asarray([1 if f else 0 for f in is_int]),
        bounds=Bounds(np.asarray(lower), np.asarray(upper)),
        options={"time_limit": time_limit, "mip_rel_gap": gap, "presolve": True},
    )
    status = {0: "optimal", 1: "time_limit", 2: "infeasible", 3: "unbounded"}.get(res.status, "error")
    if status == "time_limit" and res.x is None:
        values = None
    else:
        values = res.x
    bound = getattr(res, "mip_dual_bound", None)
    if bound is None and res.fun is not None:
        bound = res.fun
    return status, values, res.fun, bound


def _solve_glpk(problem: MpsProblem, time_limit: float, gap: float):
    from cvxopt import glpk, matrix, spmatrix

    c, rows, senses, rhs, lower, upper, is_int = problem.to_arrays()
    n = len(c)
    eq_data, eq_i, eq_j, eq_rhs = [], [], [], []
    in_data, in_i, in_j, in_rhs = [], [], [], []
    for r, row in enumerate(rows):
        if senses[r] == "EQ":
            for j, coeff in row.items():
                eq_i.append(len(eq_rhs))
                eq_j.append(j)
                eq_data.append(coeff)
            eq_rhs.append(rhs[r])
        else:
            sign = 1.0 if senses[r] == "LE" else -1.0
            for j, coeff in row.items():
                in_i.append(len(in_rhs))
                in_j.append(j)
                in_data.append(sign * coeff)
            in_rhs.append(sign * rhs[r])
    binaries = {j for j, flag in enumerate(is_int)
                if flag and lower[j] == 0.0 and upper[j] == 1.0}
    integers = {j for j, flag in enumerate(is_int) if flag} - binaries
    for j in range(n):
        if j in binaries:
            continue
        if math.isfinite(upper[j]):
            in_i.append(len(in_rhs))
            in_j.append(j)
            in_data.append(1.0)
            in_rhs.append(upper[j])
        if math.isfinite(lower[j]):
            in_i.append(len(in_rhs))
            in_j.append(j)
            in_data.append(-1.0)
            in_rhs.append(-lower[j])
    if not in_rhs:  # glpk needs at least one inequality row
        in_i.append(0)
        in_j.append(0)
        in_data.append(0.0)
        in_rhs.append(1.0)
    g = spmatrix(in_data, in_i, in_j, (len(in_rhs), n))
    h = matrix(in_rhs)
    a = spmatrix(eq_data, eq_i, eq_j, (len(eq_rhs), n)) if eq_rhs else None
    b = matrix(eq_rhs) if eq_rhs else None
    options = {"msg_lev": "GLP_MSG_OFF", "tm_lim": max(1, int(time_limit * 1000))}
    if a is not None:
        status, x = glpk.ilp(matrix(c), g, h, a, b, I=integers, B=binaries, options=options)
    else:
        status, x = glpk.ilp(matrix(c), g, h, I=integers, B=binaries, options=options)
    if status == "optimal":
        values = [float(v) for v in x]
        objective = sum(ci * vi for ci, vi in zip(c, values))
        return "optimal", values, objective, objective
    if "infeasible" in status:
        return "infeasible", None, None, None
    if status in ("time limit exceeded", "unknown"):
        return "time_limit", None, None, None
    return "error", None, None, None


ENGINES = {"highs": _solve_highs, "glpk": _solve_glpk}


def _fmt(value: float) -> str:
    return repr(float(value))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gridtep-solve", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--mps", required=True, help="input MPS file")
    parser.add_argument("--sol", required=True, help="output solution file")
    parser.add_argument("--engine", choices=sorted(ENGINES), default="highs")
    parser.add_argument("--timelimit", type=float, default=1e8, help="seconds")
    parser.add_argument("--gap", type=float, default=0.0, help="relative MIP gap target")
    args = parser.parse_args(argv)

    try:
        problem = read_mps(args.mps)
    except (OSError, ValueError) as exc:
        print(f"gridtep-solve: cannot read {args.mps}: {exc}", file=sys.stderr)
        return 2

    status, values, objective, bound = ENGINES[args.engine](problem, args.timelimit, args.gap)

    lines = [f"=status= {status}"]
    if objective is not None:
        lines.append(f"=objective= {_fmt(objective)}")
    if bound is not None:
        lines.append(f"=bound= {_fmt(bound)}")
    if values is not None:
        for name, value in zip(problem.column_names, values):
            lines.append(f"{name} {_fmt(value)}")
    Path(args.sol).write_text("\n".join(lines) + "\n")
    print(f"gridtep-solve: {status}" + (f" objective {objective}" if objective is not None else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
