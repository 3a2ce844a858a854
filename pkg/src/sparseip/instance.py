"""Sparse covering/packing integer programs.

A `SparseIP` holds either a covering program

    min c.x  s.t.  Ax >= b, 0 <= x <= d, x integral

or a packing program (max, Ax <= b). All data is exact (`fractions.Fraction`); an
entry of `d` equal to `None` means the variable has no upper bound.
"""

import enum
from collections import Counter
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from sparseip.engine import LpProblem, LpRow, Objective, Relation, SimplexEngine
from sparseip.errors import InvalidInstance, ZeroDemandRow

__all__ = [
    "Sense",
    "SparseIP",
    "IntSolution",
    "Violation",
    "to_rational",
    "validate",
    "check_instance",
    "normalize_cover",
    "preprocess_pack",
    "restore_columns",
    "normalize_pack_width",
    "lp_relaxation",
    "naive_lp_value",
]

Entry = Tuple[int, int, Fraction]


class Sense(str, enum.Enum):
    COVER = "cover"
    PACK = "pack"


def to_rational(value) -> Fraction:
    """Convert an int, Fraction or "p/q" string into a Fraction.

    Floats are refused: every number in the package is exact.
    """
    if isinstance(value, float):
        raise TypeError(f"floating point value {value!r} is not accepted; use 'p/q'")
    if isinstance(value, str):
        value = value.strip()
    return Fraction(value)


def _to_bound(value) -> Optional[Fraction]:
    if value is None or (isinstance(value, str) and value.strip() == "inf"):
        return None
    return to_rational(value)


@dataclass(frozen=True)
class SparseIP:
    """Covering or packing integer program with a sparse constraint matrix.

    Args:
        sense (Sense): `Sense.COVER` (minimise, Ax >= b) or `Sense.PACK` (maximise, Ax <= b).
        nrows (int): Number of constraints m.
        ncols (int): Number of variables n.
        entries (tuple): `(i, j, A_ij)` triples; stored sorted by `(i, j)`.
        b (tuple): Right-hand sides, length m.
        c (tuple): Objective coefficients, length n.
        d (tuple): Multiplicity bounds, length n, `None` for +infinity.
    """

    sense: Sense
    nrows: int
    ncols: int
    entries: Tuple[Entry, ...]
    b: Tuple[Fraction, ...]
    c: Tuple[Fraction, ...]
    d: Tuple[Optional[Fraction], ...]

    def __post_init__(self):
        object.__setattr__(self, "sense", Sense(self.sense))
        entries = tuple(
            sorted((int(i), int(j), to_rational(a)) for i, j, a in self.entries)
        )
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "b", tuple(to_rational(v) for v in self.b))
        object.__setattr__(self, "c", tuple(to_rational(v) for v in self.c))
        object.__setattr__(self, "d", tuple(_to_bound(v) for v in self.d))

    @classmethod
    def from_rows(cls, sense, rows: Sequence[Dict[int, object]], b, c, d) -> "SparseIP":
        """Build an instance from one `{column: coefficient}` dict per row."""
        entries = [(i, j, a) for i, row in enumerate(rows) for j, a in row.items() if a != 0]
        return cls(sense, len(rows), len(c), tuple(entries), tuple(b), tuple(c), tuple(d))

    @cached_property
    def rows(self) -> List[Dict[int, Fraction]]:
        rows: List[Dict[int, Fraction]] = [dict() for _ in range(self.nrows)]
        for i, j, a in self.entries:
            rows[i][j] = a
        return rows

    @cached_property
    def cols(self) -> List[Dict[int, Fraction]]:
        cols: List[Dict[int, Fraction]] = [dict() for _ in range(self.ncols)]
        for i, j, a in self.entries:
            cols[j][i] = a
        return cols

    def row_sparsity(self) -> int:
        return max((len(row) for row in self.rows), default=0)

    def col_sparsity(self) -> int:
        return max((len(col) for col in self.cols), default=0)

    def width(self) -> Optional[Fraction]:
        """Return min over stored entries of b_i / A_ij, or None when A has no entries."""
        return min((self.b[i] / a for i, _, a in self.entries), default=None)

    def row_activity(self, x: Sequence) -> Tuple[Fraction, ...]:
        return tuple(
            sum((a * x[j] for j, a in row.items()), Fraction(0)) for row in self.rows
        )

    def objective(self, x: Sequence) -> Fraction:
        return sum((cj * xj for cj, xj in zip(self.c, x)), Fraction(0))

    def is_feasible(self, x: Sequence) -> bool:
        """Exact check of bounds and rows (integrality is the caller's concern)."""
        for xj, dj in zip(x, self.d):
            if xj < 0 or (dj is not None and xj > dj):
                return False
        activity = self.row_activity(x)
        if self.sense is Sense.COVER:
            return all(lhs >= bi for lhs, bi in zip(activity, self.b))
        return all(lhs <= bi for lhs, bi in zip(activity, self.b))

    def replace(self, **changes) -> "SparseIP":
        return replace(self, **changes)


@dataclass(frozen=True)
class IntSolution:
    """Integral point together with its exact objective value."""

    x: Tuple[int, ...]
    objective: Fraction

    @classmethod
    def from_x(cls, inst: SparseIP, x: Sequence) -> "IntSolution":
        xs = []
        for v in x:
            v = Fraction(v)
            if v.denominator != 1:
                raise ValueError(f"solution coordinate {v} is not integral")
            xs.append(int(v))
        return cls(tuple(xs), inst.objective(xs))


@dataclass(frozen=True)
class Violation:
    """One broken invariant of an instance, with the coordinates involved."""

    kind: str
    message: str
    row: Optional[int] = None
    col: Optional[int] = None

    def __str__(self):
        return self.message


def validate(inst: SparseIP) -> List[Violation]:
    """Return every invariant violation of `inst`; the list is empty iff it is well formed."""
    violations: List[Violation] = []
    m, n = inst.nrows, inst.ncols
    if m < 0 or n < 0:
        violations.append(Violation("dimension", f"negative dimension m={m}, n={n}"))
        return violations
    for name, vector, expected in (("b", inst.b, m), ("c", inst.c, n), ("d", inst.d, n)):
        if len(vector) != expected:
            violations.append(
                Violation(
                    "length",
                    f"length of {name} is {len(vector)}, expected {expected}",
                )
            )

    counts = Counter((i, j) for i, j, _ in inst.entries)
    for (i, j), count in sorted(counts.items()):
        if count > 1:
            violations.append(
                Violation("duplicate", f"duplicate coordinate ({i},{j})", row=i, col=j)
            )
    for i, j, a in inst.entries:
        if not (0 <= i < m and 0 <= j < n):
            violations.append(
                Violation("range", f"entry ({i},{j}) outside {m}x{n}", row=i, col=j)
            )
        if a <= 0:
            violations.append(
                Violation("entry", f"entry ({i},{j}) = {a} is not positive", row=i, col=j)
            )

    for i, bi in enumerate(inst.b):
        if bi < 0:
            violations.append(Violation("negative", f"b[{i}] = {bi} is negative", row=i))
    for j, cj in enumerate(inst.c):
        if cj < 0:
            violations.append(Violation("negative", f"c[{j}] = {cj} is negative", col=j))
    for j, dj in enumerate(inst.d):
        if dj is None:
            continue
        if dj < 0:
            violations.append(Violation("negative", f"d[{j}] = {dj} is negative", col=j))
        if dj.denominator != 1:
            violations.append(Violation("integrality", f"d[{j}] not integral", col=j))
    return violations


def check_instance(inst: SparseIP) -> SparseIP:
    """Raise `InvalidInstance` unless `inst` validates; returns `inst` for chaining."""
    violations = validate(inst)
    if violations:
        raise InvalidInstance(violations)
    return inst


def normalize_cover(inst: SparseIP) -> SparseIP:
    """Scale every covering row to b_i = 1 and clip coefficients at 1.

    Clipping is sound because x is integral and nonnegative: any variable with
    coefficient at least b_i satisfies the row on its own as soon as it is positive.

    Raises:
        ZeroDemandRow: If some b_i <= 0.
    """
    if inst.sense is not Sense.COVER:
        raise ValueError("normalize_cover expects a covering instance")
    for i, bi in enumerate(inst.b):
        if bi <= 0:
            raise ZeroDemandRow(f"row {i} has b = {bi}; drop it before normalising")
    entries = tuple((i, j, min(Fraction(1), a / inst.b[i])) for i, j, a in inst.entries)
    return inst.replace(entries=entries, b=(Fraction(1),) * inst.nrows)


def preprocess_pack(inst: SparseIP) -> Tuple[SparseIP, List[int]]:
    """Delete every packing column with some A_ij > b_i (such x_j is 0 in any feasible x).

    Returns:
        tuple: The reduced instance and the sorted original indices of deleted columns.
    """
    if inst.sense is not Sense.PACK:
        raise ValueError("preprocess_pack expects a packing instance")
    deleted = sorted({j for i, j, a in inst.entries if a > inst.b[i]})
    if not deleted:
        return inst, []
    gone = set(deleted)
    kept = [j for j in range(inst.ncols) if j not in gone]
    new_index = {j: pos for pos, j in enumerate(kept)}
    entries = tuple((i, new_index[j], a) for i, j, a in inst.entries if j not in gone)
    reduced = inst.replace(
        ncols=len(kept),
        entries=entries,
        c=tuple(inst.c[j] for j in kept),
        d=tuple(inst.d[j] for j in kept),
    )
    return reduced, deleted


def restore_columns(x: Sequence[int], deleted_cols: Sequence[int], ncols: int) -> Tuple[int, ...]:
    """Map a solution of a `preprocess_pack`-reduced instance back to the original columns."""
    gone = set(deleted_cols)
    values = iter(x)
    return tuple(0 if j in gone else next(values) for j in range(ncols))


def normalize_pack_width(inst: SparseIP) -> SparseIP:
    """Scale packing rows to b_i = 1, dropping rows that have no entries.

    Rows with b_i = 0 must be empty here (run `preprocess_pack` first).
    """
    if inst.sense is not Sense.PACK:
        raise ValueError("normalize_pack_width expects a packing instance")
    keep = [i for i in range(inst.nrows) if inst.rows[i]]
    for i in keep:
        if inst.b[i] <= 0:
            raise ZeroDemandRow(f"row {i} has b = {inst.b[i]} but nonzero entries")
    new_row = {i: pos for pos, i in enumerate(keep)}
    entries = tuple(
        (new_row[i], j, a / inst.b[i]) for i, j, a in inst.entries if i in new_row
    )
    return inst.replace(nrows=len(keep), entries=entries, b=(Fraction(1),) * len(keep))


def lp_relaxation(inst: SparseIP, extra_rows: Sequence[LpRow] = ()) -> LpProblem:
    """Return the linear relaxation {opt c.x : Ax (>=|<=) b, 0 <= x <= d}."""
    relation = Relation.GE if inst.sense is Sense.COVER else Relation.LE
    objective = Objective.MIN if inst.sense is Sense.COVER else Objective.MAX
    rows = [LpRow.build(row, relation, bi) for row, bi in zip(inst.rows, inst.b)]
    rows.extend(extra_rows)
    return LpProblem(objective, inst.c, tuple(rows), upper=inst.d)


def naive_lp_value(inst: SparseIP, lp_engine=None) -> Optional[Fraction]:
    """Value of the plain LP relaxation, None when it has no optimum."""
    engine = lp_engine if lp_engine is not None else SimplexEngine()
    solution = engine.solve(lp_relaxation(inst))
    return solution.value if solution.is_optimal else None
