"""MPS export for PlanModel instances.

Sections emitted: NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA.  Row and column
names reuse the reversible VarRef / constraint-tag grammar, so a solution file
keyed by column name maps straight back onto model variables.  Binaries are
declared with BV bounds and free variables with FR; output is byte-identical
for identical models.
"""

from __future__ import annotations

import math
from pathlib import Path

from ..mipcore import MAX_NAME_LEN, PlanModel

OBJECTIVE_ROW = "COST"
_SENSE_CODE = {"LE": "L", "EQ": "E", "GE": "G"}


def _num(value: float) -> str:
    return str(int(value)) if float(value).is_integer() and abs(value) < 1e15 else repr(float(value))


def mps_text(model: PlanModel) -> str:
    lines = ["NAME          GRIDTEP", "ROWS", f" N  {OBJECTIVE_ROW}"]
    for row in model.constraints:
        if len(row.name) > MAX_NAME_LEN:
            raise ValueError(f"row name too long: {row.name}")
        lines.append(f" {_SENSE_CODE[row.sense]}  {row.name}")

    entries: dict = {v.ref: [] for v in model.variables}
    for ref, coeff in model.objective:
        entries[ref].append((OBJECTIVE_ROW, coeff))
    for row in model.constraints:
        for ref, coeff in row.terms:
            entries[ref].append((row.name, coeff))

    lines.append("COLUMNS")
    for v in model.variables:
        name = v.ref.name
        if len(name) > MAX_NAME_LEN:
            raise ValueError(f"column name too long: {name}")
        for row_name, coeff in entries[v.ref]:
            lines.append(f"    {name}  {row_name}  {_num(coeff)}")

    lines.append("RHS")
    for row in model.constraints:
        if row.rhs != 0.0:
            lines.append(f"    RHS  {row.name}  {_num(row.rhs)}")

    lines.append("BOUNDS")
    for v in model.variables:
        name = v.ref.name
        if v.binary:
            lines.append(f" BV BND  {name}")
        elif v.lower == -math.inf and v.upper == math.inf:
            lines.append(f" FR BND  {name}")
        elif v.lower == v.upper:
            lines.append(f" FX BND  {name}  {_num(v.lower)}")
        else:
            if v.lower == -math.inf:
                lines.append(f" MI BND  {name}")
            elif v.lower != 0.0:
                lines.append(f" LO BND  {name}  {_num(v.lower)}")
            if v.upper != math.inf:
                lines.append(f" UP BND  {name}  {_num(v.upper)}")

    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def write_mps(model: PlanModel, path: str | Path) -> None:
    Path(path).write_text(mps_text(model))
