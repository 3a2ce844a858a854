"""Exact rational LP engine.

The engine solves linear programs over `fractions.Fraction` with a bounded-variable
primal simplex (phase 1 with one artificial variable per row, phase 2 on the original
objective) and Bland's least-index rule, so it terminates under degeneracy and always
returns a vertex of the feasible region.
"""

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from sktime.base import BaseObject

from sparseip.errors import LpTooLarge
from sparseip.logger import logger

__all__ = [
    "Objective",
    "Relation",
    "Status",
    "LpRow",
    "LpProblem",
    "LpSolution",
    "LPEngine",
    "SimplexEngine",
    "solve",
    "fractional_support",
]

DEFAULT_MAX_SIZE = 10_000


class Objective(str, enum.Enum):
    MAX = "max"
    MIN = "min"


class Relation(str, enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpRow:
    """A single constraint `coeffs . x  relation  rhs` with sparse coefficients."""

    coeffs: Tuple[Tuple[int, Fraction], ...]
    relation: Relation
    rhs: Fraction

    @classmethod
    def build(cls, coeffs: Dict[int, Fraction], relation, rhs) -> "LpRow":
        items = tuple(sorted((j, Fraction(a)) for j, a in coeffs.items() if a != 0))
        return cls(items, Relation(relation), Fraction(rhs))

    def activity(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * x[j] for j, a in self.coeffs), Fraction(0))

    def is_satisfied(self, x: Sequence[Fraction]) -> bool:
        lhs = self.activity(x)
        if self.relation is Relation.LE:
            return lhs <= self.rhs
        if self.relation is Relation.GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LpProblem:
    """Linear program with per-variable bounds.

    Args:
        objective (Objective): `Objective.MAX` or `Objective.MIN`.
        c (tuple): Objective coefficients.
        rows (tuple): Constraints as `LpRow` records.
        lower (tuple): Finite lower bound per variable.
        upper (tuple): Upper bound per variable, `None` meaning +infinity.
    """

    objective: Objective
    c: Tuple[Fraction, ...]
    rows: Tuple[LpRow, ...] = ()
    lower: Optional[Tuple[Fraction, ...]] = None
    upper: Optional[Tuple[Optional[Fraction], ...]] = None

    def __post_init__(self):
        n = len(self.c)
        object.__setattr__(self, "objective", Objective(self.objective))
        object.__setattr__(self, "c", tuple(Fraction(v) for v in self.c))
        object.__setattr__(self, "rows", tuple(self.rows))
        lower = self.lower if self.lower is not None else (Fraction(0),) * n
        upper = self.upper if self.upper is not None else (None,) * n
        object.__setattr__(self, "lower", tuple(Fraction(v) for v in lower))
        object.__setattr__(
            self, "upper", tuple(None if v is None else Fraction(v) for v in upper)
        )
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError("bounds must have one entry per variable")
        for j, (lo, up) in enumerate(zip(self.lower, self.upper)):
            if up is not None and lo > up:
                raise ValueError(f"lower bound exceeds upper bound for variable {j}")
        for row in self.rows:
            for j, _ in row.coeffs:
                if not 0 <= j < n:
                    raise ValueError(f"row references unknown variable {j}")

    @property
    def nvars(self) -> int:
        return len(self.c)

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((cj * xj for cj, xj in zip(self.c, x)), Fraction(0))


@dataclass(frozen=True)
class LpSolution:
    """Result of an LP solve.

    Attributes:
        status (Status): Optimal, infeasible or unbounded.
        x (tuple): Optimal point (empty unless optimal).
        value (Fraction): Objective value at `x`.
        tight_rows (frozenset): Indices of rows satisfied with equality at `x`.
        basic (bool): Whether `x` is a vertex returned from a simplex basis.
        basis (tuple): Names of the basic variables of the final basis.
    """

    status: Status
    x: Tuple[Fraction, ...] = ()
    value: Optional[Fraction] = None
    tight_rows: FrozenSet[int] = frozenset()
    basic: bool = False
    basis: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def is_optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def fractional_support(sol: LpSolution) -> FrozenSet[int]:
    """Return the indices of the non-integral coordinates of an optimal solution."""
    if not sol.is_optimal:
        raise ValueError("fractional support is only defined for optimal solutions")
    return frozenset(j for j, v in enumerate(sol.x) if v.denominator != 1)


class LPEngine(BaseObject):
    """Base class for LP engines.

    Subclasses implement `_solve`. The public `solve` checks the size limit and logs.

    Args:
        max_size (int): Maximum number of variables plus rows accepted.
        debug (bool): Dump the final tableau at DEBUG level.
    """

    def __init__(self, max_size=DEFAULT_MAX_SIZE, debug=False):
        self.max_size = max_size
        self.debug = debug
        super().__init__()
        self._validate_hyperparams()

    def _validate_hyperparams(self):
        if self.max_size <= 0:
            raise ValueError("max_size must be greater than 0.")

    def solve(self, problem: LpProblem) -> LpSolution:
        size = problem.nvars + len(problem.rows)
        if size > self.max_size:
            raise LpTooLarge(
                f"LP has {problem.nvars} variables and {len(problem.rows)} rows, "
                f"more than max_size={self.max_size}"
            )
        solution = self._solve(problem)
        logger.debug(
            "LP %dx%d solved: %s value=%s",
            len(problem.rows),
            problem.nvars,
            solution.status.value,
            solution.value,
        )
        return solution

    def _solve(self, problem: LpProblem) -> LpSolution:
        raise NotImplementedError("Must be implemented by subclass")


class SimplexEngine(LPEngine):
    """Bounded-variable two-phase primal simplex over exact rationals.

    Variables are shifted so every lower bound is zero; finite upper bounds are kept
    as bounds on the nonbasic variables instead of extra rows. Entering and leaving
    variables are chosen by Bland's rule, ties in the ratio test going to the least
    variable index (a bound flip of the entering variable counts as its own index).
    """

    def _solve(self, problem: LpProblem) -> LpSolution:
        return _Tableau(problem, debug=self.debug).run()


def solve(problem: LpProblem, max_size=DEFAULT_MAX_SIZE) -> LpSolution:
    """Solve `problem` with the default simplex engine."""
    return SimplexEngine(max_size=max_size).solve(problem)


_ZERO = Fraction(0)
_ONE = Fraction(1)


class _Tableau:
    """Dense simplex tableau for one solve.

    Columns are ordered structural variables, then slack/surplus variables, then
    artificials. `rows[i]` holds B^-1 A, `values` holds the current value of every
    column (basic and nonbasic), `basis[i]` the column basic in row i.
    """

    def __init__(self, problem: LpProblem, debug=False):
        self.problem = problem
        self.debug = debug
        n = problem.nvars
        m = len(problem.rows)
        self.n = n
        self.m = m

        self.names: List[str] = [f"x{j}" for j in range(n)]
        self.upper: List[Optional[Fraction]] = [
            None if up is None else up - lo
            for lo, up in zip(problem.lower, problem.upper)
        ]

        slack_of_row: Dict[int, int] = {}
        for i, row in enumerate(problem.rows):
            if row.relation is not Relation.EQ:
                slack_of_row[i] = len(self.names)
                self.names.append(f"s{i}")
                self.upper.append(None)
        self.first_artificial = len(self.names)
        for i in range(m):
            self.names.append(f"a{i}")
            self.upper.append(None)
        ncols = len(self.names)
        self.ncols = ncols

        self.rows: List[List[Fraction]] = []
        self.rhs: List[Fraction] = []
        for i, row in enumerate(problem.rows):
            dense = [_ZERO] * ncols
            shift = _ZERO
            for j, a in row.coeffs:
                dense[j] = a
                shift += a * problem.lower[j]
            rhs = row.rhs - shift
            if i in slack_of_row:
                dense[slack_of_row[i]] = _ONE if row.relation is Relation.LE else -_ONE
            if rhs < 0:
                dense = [-v for v in dense]
                rhs = -rhs
            dense[self.first_artificial + i] = _ONE
            self.rows.append(dense)
            self.rhs.append(rhs)

        self.values: List[Fraction] = [_ZERO] * ncols
        self.basis: List[int] = []
        for i in range(m):
            col = self.first_artificial + i
            self.basis.append(col)
            self.values[col] = self.rhs[i]
        self.is_basic = [False] * ncols
        for col in self.basis:
            self.is_basic[col] = True
        self.blocked = [False] * ncols

    # -- pricing -----------------------------------------------------------

    def _reduced_costs(self, cost: List[Fraction]) -> List[Fraction]:
        reduced = list(cost)
        for i, col in enumerate(self.basis):
            cb = cost[col]
            if cb == 0:
                continue
            row = self.rows[i]
            for j in range(self.ncols):
                if row[j] != 0:
                    reduced[j] -= cb * row[j]
        return reduced

    def _iterate(self, cost: List[Fraction]) -> Status:
        """Minimise `cost . values` from the current basis. Returns OPTIMAL or UNBOUNDED."""
        reduced = self._reduced_costs(cost)
        while True:
            entering = None
            for j in range(self.ncols):
                if self.is_basic[j] or self.blocked[j]:
                    continue
                at_upper = self.upper[j] is not None and self.values[j] == self.upper[j]
                if (reduced[j] < 0 and not at_upper) or (reduced[j] > 0 and self.values[j] > 0):
                    entering = j
                    break
            if entering is None:
                return Status.OPTIMAL

            # direction = +1 when the entering variable increases from its lower bound
            direction = 1 if reduced[entering] < 0 else -1
            best_ratio = self.upper[entering]
            leave_row = None
            leave_to_upper = False
            best_index = entering if best_ratio is not None else None

            for i, col in enumerate(self.basis):
                coef = self.rows[i][entering] * direction
                if coef > 0:
                    ratio = self.values[col] / coef
                    to_upper = False
                elif coef < 0 and self.upper[col] is not None:
                    ratio = (self.upper[col] - self.values[col]) / (-coef)
                    to_upper = True
                else:
                    continue
                if best_ratio is None or ratio < best_ratio or (
                    ratio == best_ratio and col < best_index
                ):
                    best_ratio = ratio
                    best_index = col
                    leave_row = i
                    leave_to_upper = to_upper

            if best_ratio is None:
                return Status.UNBOUNDED

            step = best_ratio * direction
            self.values[entering] += step
            for i, col in enumerate(self.basis):
                if self.rows[i][entering] != 0:
                    self.values[col] -= self.rows[i][entering] * step

            if leave_row is None:
                # bound flip, basis unchanged
                continue

            leaving = self.basis[leave_row]
            self.values[leaving] = self.upper[leaving] if leave_to_upper else _ZERO
            self._pivot(leave_row, entering, reduced)

    def _pivot(self, r: int, col: int, reduced: Optional[List[Fraction]] = None):
        pivot_row = self.rows[r]
        piv = pivot_row[col]
        if piv != 1:
            pivot_row = [v / piv for v in pivot_row]
            self.rows[r] = pivot_row
        nonzero = [j for j in range(self.ncols) if pivot_row[j] != 0]
        for i in range(self.m):
            if i == r:
                continue
            factor = self.rows[i][col]
            if factor == 0:
                continue
            row = self.rows[i]
            for j in nonzero:
                row[j] -= factor * pivot_row[j]
        if reduced is not None:
            factor = reduced[col]
            if factor != 0:
                for j in nonzero:
                    reduced[j] -= factor * pivot_row[j]
        leaving = self.basis[r]
        self.is_basic[leaving] = False
        self.is_basic[col] = True
        self.basis[r] = col

    # -- phases --------------------------------------------------------------

    def _drive_out_artificials(self):
        for r in range(self.m):
            col = self.basis[r]
            if col < self.first_artificial:
                continue
            for j in range(self.first_artificial):
                if not self.is_basic[j] and self.rows[r][j] != 0:
                    self._pivot(r, j)
                    break

    def run(self) -> LpSolution:
        phase1 = [_ZERO] * self.ncols
        for j in range(self.first_artificial, self.ncols):
            phase1[j] = _ONE
        self._iterate(phase1)
        infeasibility = sum((self.values[j] for j in range(self.first_artificial, self.ncols)), _ZERO)
        if infeasibility > 0:
            return LpSolution(Status.INFEASIBLE)

        self._drive_out_artificials()
        for j in range(self.first_artificial, self.ncols):
            self.blocked[j] = True
            self.upper[j] = _ZERO

        sign = -1 if self.problem.objective is Objective.MAX else 1
        phase2 = [_ZERO] * self.ncols
        for j, cj in enumerate(self.problem.c):
            phase2[j] = sign * cj
        status = self._iterate(phase2)
        if status is Status.UNBOUNDED:
            return LpSolution(Status.UNBOUNDED)

        x = tuple(self.values[j] + self.problem.lower[j] for j in range(self.n))
        tight = frozenset(
            i for i, row in enumerate(self.problem.rows) if row.activity(x) == row.rhs
        )
        if self.debug:
            self._dump()
        return LpSolution(
            status=Status.OPTIMAL,
            x=x,
            value=self.problem.value(x),
            tight_rows=tight,
            basic=True,
            basis=tuple(self.names[col] for col in self.basis),
        )

    def _dump(self):
        header = " ".join(f"{name:>8}" for name in self.names)
        lines = [f"{'basis':>6} {header} | value"]
        for i, col in enumerate(self.basis):
            cells = " ".join(f"{str(v):>8}" for v in self.rows[i])
            lines.append(f"{self.names[col]:>6} {cells} | {self.values[col]}")
        logger.debug("final tableau\n%s", "\n".join(lines))
