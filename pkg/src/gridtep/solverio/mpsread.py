"""Standalone MPS reader used by the solve adapters.

Implements the format from its published description and deliberately shares
no code with the writer, so writer/reader round trips are a genuine
two-implementation check.  Supports N/L/G/E rows, single- or double-pair
COLUMNS and RHS records, INTORG/INTEND markers, and LO/UP/FX/FR/MI/PL/BV/LI/UI
bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path


class MpsFormatError(ValueError):
    pass


@dataclass
class MpsProblem:
    name: str = ""
    objective_row: str = ""
    row_names: list[str] = field(default_factory=list)       # constraint rows only
    row_senses: list[str] = field(default_factory=list)      # LE / EQ / GE
    column_names: list[str] = field(default_factory=list)
    entries: dict[tuple[str, str], float] = field(default_factory=dict)  # (row, column) -> coeff
    objective: dict[str, float] = field(default_factory=dict)
    rhs: dict[str, float] = field(default_factory=dict)
    lower: dict[str, float] = field(default_factory=dict)
    upper: dict[str, float] = field(default_factory=dict)
    integer: set[str] = field(default_factory=set)

    def column_bounds(self, name: str) -> tuple[float, float]:
        return self.lower.get(name, 0.0), self.upper.get(name, math.inf)

    def to_arrays(self):
        """Dense-ish matrix view: (c, a_rows, senses, rhs, lower, upper, integer_flags).

        a_rows is a list of {column index: coefficient} maps, one per constraint row.
        """
        col_index = {name: idx for idx, name in enumerate(self.column_names)}
        c = [self.objective.get(name, 0.0) for name in self.column_names]
        rows: list[dict[int, float]] = [dict() for _ in self.row_names]
        row_index = {name: idx for idx, name in enumerate(self.row_names)}
        for (row, col), coeff in self.entries.items():
            rows[row_index[row]][col_index[col]] = coeff
        rhs = [self.rhs.get(name, 0.0) for name in self.row_names]
        lower = [self.lower.get(name, 0.0) for name in self.column_names]
        upper = [self.upper.get(name, math.inf) for name in self.column_names]
        is_int = [name in self.integer for name in self.column_names]
        return c, rows, list(self.row_senses), rhs, lower, upper, is_int


_ROW_SENSES = {"L": "LE", "G": "GE", "E": "EQ"}


def read_mps_text(text: str) -> MpsProblem:
    problem = MpsProblem()
    section = None
    seen_columns: set[str] = set()
    row_senses: dict[str, str] = {}
    in_integer_block = False

    def require_column(name: str, lineno: int):
        if name not in seen_columns:
            raise MpsFormatError(f"line {lineno}: bound/entry for undeclared column {name!r}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        if not raw[0].isspace():
            fields = raw.split()
            keyword = fields[0].upper()
            if keyword == "NAME":
                problem.name = fields[1] if len(fields) > 1 else ""
                continue
            if keyword in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES", "ENDATA"):
                if keyword == "RANGES":
                    raise MpsFormatError(f"line {lineno}: RANGES section not supported")
                section = keyword
                continue
            raise MpsFormatError(f"line {lineno}: unknown section {fields[0]!r}")

        fields = raw.split()
        if section == "ROWS":
            if len(fields) != 2:
                raise MpsFormatError(f"line {lineno}: ROWS record needs a type and a name")
            rtype, name = fields[0].upper(), fields[1]
            if rtype == "N":
                if not problem.objective_row:
                    problem.objective_row = name
                continue
            if rtype not in _ROW_SENSES:
                raise MpsFormatError(f"line {lineno}: unknown row type {fields[0]!r}")
            if name in row_senses:
                raise MpsFormatError(f"line {lineno}: duplicate row {name!r}")
            row_senses[name] = _ROW_SENSES[rtype]
            problem.row_names.append(name)
            problem.row_senses.append(_ROW_SENSES[rtype])
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1].upper() == "'MARKER'":
                marker = fields[2].strip("'").upper()
                if marker == "INTORG":
                    in_integer_block = True
                elif marker == "INTEND":
                    in_integer_block = False
                continue
            if len(fields) not in (3, 5):
                raise MpsFormatError(f"line {lineno}: COLUMNS record needs 1 or 2 row/value pairs")
            col = fields[0]
            if col not in seen_columns:
                seen_columns.add(col)
                problem.column_names.append(col)
                if in_integer_block:
                    problem.integer.add(col)
                    problem.upper.setdefault(col, 1.0)
            for at in range(1, len(fields), 2):
                row, value = fields[at], float(fields[at + 1])
                if row == problem.objective_row:
                    problem.objective[col] = problem.objective.get(col, 0.0) + value
                elif row in row_senses:
                    key = (row, col)
                    problem.entries[key] = problem.entries.get(key, 0.0) + value
                else:
                    raise MpsFormatError(f"line {lineno}: entry for unknown row {row!r}")
        elif section == "RHS":
            if len(fields) not in (3, 5):
                raise MpsFormatError(f"line {lineno}: RHS record needs 1 or 2 row/value pairs")
            for at in range(1, len(fields), 2):
                row, value = fields[at], float(fields[at + 1])
                if row not in row_senses and row != problem.objective_row:
                    raise MpsFormatError(f"line {lineno}: RHS for unknown row {row!r}")
                if row != problem.objective_row:
                    problem.rhs[row] = value
        elif section == "BOUNDS":
            btype = fields[0].upper()
            if btype in ("FR", "MI", "PL", "BV"):
                if len(fields) != 3:
                    raise MpsFormatError(f"line {lineno}: {btype} bound needs a set name and a column")
                col = fields[2]
                require_column(col, lineno)
                if btype == "FR":
                    problem.lower[col] = -math.inf
                    problem.upper[col] = math.inf
                elif btype == "MI":
                    problem.lower[col] = -math.inf
                elif btype == "PL":
                    problem.upper[col] = math.inf
                else:
                    problem.lower[col] = 0.0
                    problem.upper[col] = 1.0
                    problem.integer.add(col)
            elif btype in ("LO", "UP", "FX", "LI", "UI"):
                if len(fields) != 4:
                    raise MpsFormatError(f"line {lineno}: {btype} bound needs a set name, column and value")
                col, value = fields[2], float(fields[3])
                require_column(col, lineno)
                if btype in ("LO", "LI"):
                    problem.lower[col] = value
                elif btype in ("UP", "UI"):
                    problem.upper[col] = value
                    if value < 0.0 and col not in problem.lower:
                        problem.lower[col] = -math.inf
                else:
                    problem.lower[col] = value
                    problem.upper[col] = value
                if btype in ("LI", "UI"):
                    problem.integer.add(col)
            else:
                raise MpsFormatError(f"line {lineno}: unknown bound type {fields[0]!r}")
        elif section == "ENDATA":
            raise MpsFormatError(f"line {lineno}: data after ENDATA")
        else:
            raise MpsFormatError(f"line {lineno}: record outside any section")

    if not problem.objective_row:
        raise MpsFormatError("no objective (N) row declared")
    return problem


def read_mps(path: str | Path) -> MpsProblem:
    return read_mps_text(Path(path).read_text())
