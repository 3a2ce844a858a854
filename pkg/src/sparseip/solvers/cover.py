"""k-approximation for covering programs with at most k nonzeros per row.

The pipeline is: clip and scale every row to b_i = 1, replace each row by an
equivalent k-roundable one, strengthen the LP with knapsack-cover cuts until no
cut at the "rounded to full multiplicity" set is violated, and round
x = min(d, floor(k x*)).
"""

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple, Union

from sparseip.engine import LpRow, Relation, Status
from sparseip.errors import (
    IndexOutOfRange,
    InfeasibleInstance,
    InvariantViolation,
    MalformedRow,
)
from sparseip.instance import (
    IntSolution,
    SparseIP,
    lp_relaxation,
    naive_lp_value,
    normalize_cover,
)
from sparseip.logger import logger
from sparseip.solvers.base import BaseIPSolver

__all__ = [
    "Provenance",
    "RoundableRow",
    "KcCut",
    "is_roundable",
    "make_roundable",
    "kc_cut",
    "CoverSolver",
    "solve_cover",
]

RowLike = Union[Mapping[int, Fraction], Sequence[Fraction]]


def _as_row(alpha: RowLike) -> Dict[int, Fraction]:
    if isinstance(alpha, Mapping):
        items = alpha.items()
    else:
        items = enumerate(alpha)
    return {int(j): Fraction(a) for j, a in items if a != 0}


class Provenance(str, enum.Enum):
    UNCHANGED = "unchanged"
    REPLACED = "replaced"


@dataclass(frozen=True)
class RoundableRow:
    """A covering row `coeffs . x >= 1` that is k-roundable.

    When `provenance` is `REPLACED`, the row is the canonical form with `t` unit
    coefficients, then coefficients (v-1)/v, then a single 1/v coefficient (in the
    order coefficient descending, column ascending of the original row).
    """

    coeffs: Tuple[Tuple[int, Fraction], ...]
    provenance: Provenance
    t: Optional[int] = None
    v: Optional[int] = None

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.coeffs)

    @property
    def replaced(self) -> bool:
        return self.provenance is Provenance.REPLACED


@dataclass(frozen=True)
class KcCut:
    """Knapsack-cover inequality of row `row` with the columns of `fixed` at full multiplicity.

    Reads `sum_{j not in fixed} coeffs_j x_j >= rhs`, where
    `rhs = b_i - sum_{j in fixed} A_ij d_j > 0` and `coeffs_j = min(A_ij, rhs)`.
    """

    row: int
    fixed: FrozenSet[int]
    coeffs: Tuple[Tuple[int, Fraction], ...]
    rhs: Fraction

    def to_lp_row(self) -> LpRow:
        return LpRow(self.coeffs, Relation.GE, self.rhs)

    def is_violated_by(self, x: Sequence[Fraction]) -> bool:
        return not self.to_lp_row().is_satisfied(x)


def is_roundable(alpha: RowLike, rho, search_bound: int = 64) -> Optional[Tuple[Fraction, ...]]:
    """Test whether `alpha . x >= 1` implies `alpha . floor(rho x) >= 1` for real x >= 0.

    A counterexample exists iff some integer z >= 0 has `alpha . z < 1` and
    `alpha . (z + 1) > rho` (summing over the support of alpha). The z are enumerated
    lexicographically with `z_j <= min(search_bound, ceil(1 / alpha_j) - 1)`; the test
    is exhaustive once `search_bound` reaches `ceil(1 / min alpha) - 1`.

    Args:
        alpha: Nonnegative coefficients, dense sequence or `{column: value}`.
        rho: Rounding factor, greater than 1.
        search_bound (int): Cap on each coordinate of z.

    Returns:
        None if no counterexample was found, else a dense point x with
        `alpha . x = 1` and `alpha . floor(rho x) < 1`.
    """
    rho = Fraction(rho)
    if rho <= 1:
        raise ValueError(f"rho must be greater than 1, got {rho}")
    row = _as_row(alpha)
    if any(a < 0 for a in row.values()):
        raise ValueError("alpha must be nonnegative")
    support = sorted(row)
    if not support:
        return None
    length = max(support) + 1 if isinstance(alpha, Mapping) else len(alpha)
    total = sum(row.values(), Fraction(0))
    ranges = [range(min(search_bound, math.ceil(1 / row[j]) - 1) + 1) for j in support]
    for z in itertools.product(*ranges):
        covered = sum((row[j] * zj for j, zj in zip(support, z)), Fraction(0))
        if covered >= 1 or covered + total <= rho:
            continue
        # scale z + 1 onto the hyperplane alpha . x = 1
        x = [Fraction(0)] * length
        for j, zj in zip(support, z):
            x[j] = (zj + 1) / (covered + total)
        return tuple(x)
    return None


def make_roundable(alpha: RowLike, k: int) -> RoundableRow:
    """Replace a normalized covering row by an equivalent k-roundable row.

    Rows whose coefficients sum to at most k - 1, and rows of unit coefficients, are
    already k-roundable and come back unchanged. Otherwise the row has exactly k
    nonzeros, any two of which sum to more than 1, and it is replaced by

        x_1 + ... + x_t + (v-1)/v (x_{t+1} + ... + x_{k-1}) + 1/v x_k >= 1

    with columns ordered by coefficient descending (column ascending on ties),
    t the number of unit coefficients and v = ceil(1 / smallest coefficient). Both
    rows have the same nonnegative integer solutions.

    Raises:
        MalformedRow: If a coefficient lies outside (0, 1] or there are more than k.
    """
    row = _as_row(alpha)
    for j, a in row.items():
        if not 0 < a <= 1:
            raise MalformedRow(f"coefficient {a} of column {j} outside (0, 1]")
    if len(row) > k:
        raise MalformedRow(f"row has {len(row)} nonzeros, more than k = {k}")

    coeffs = tuple(sorted(row.items()))
    if sum(row.values(), Fraction(0)) <= k - 1 or all(a == 1 for a in row.values()):
        return RoundableRow(coeffs, Provenance.UNCHANGED)

    order = sorted(row, key=lambda j: (-row[j], j))
    t = sum(1 for j in order if row[j] == 1)
    v = math.ceil(1 / row[order[-1]])
    replaced: Dict[int, Fraction] = {}
    for position, j in enumerate(order):
        if position < t:
            replaced[j] = Fraction(1)
        elif position < len(order) - 1:
            replaced[j] = Fraction(v - 1, v)
        else:
            replaced[j] = Fraction(1, v)
    return RoundableRow(tuple(sorted(replaced.items())), Provenance.REPLACED, t=t, v=v)


def kc_cut(inst: SparseIP, i: int, fixed) -> Optional[KcCut]:
    """Knapsack-cover cut of row `i` for the column set `fixed`.

    Returns None when the cut is not defined: some fixed column has unbounded
    multiplicity, or the fixed columns alone already cover the row.

    Raises:
        IndexOutOfRange: If `i` is not a row or `fixed` leaves the row's support.
    """
    if not 0 <= i < inst.nrows:
        raise IndexOutOfRange(f"row {i} outside 0..{inst.nrows - 1}")
    row = inst.rows[i]
    fixed = frozenset(fixed)
    outside = sorted(fixed - set(row))
    if outside:
        raise IndexOutOfRange(f"columns {outside} are not in the support of row {i}")
    if any(inst.d[j] is None for j in fixed):
        return None
    rhs = inst.b[i] - sum((row[j] * inst.d[j] for j in fixed), Fraction(0))
    if rhs <= 0:
        return None
    coeffs = tuple((j, min(a, rhs)) for j, a in sorted(row.items()) if j not in fixed)
    return KcCut(i, fixed, coeffs, rhs)


def _round_down(x: Sequence[Fraction], d, k: int) -> List[int]:
    rounded = []
    for xj, dj in zip(x, d):
        value = math.floor(k * xj)
        rounded.append(value if dj is None else min(int(dj), value))
    return rounded


class CoverSolver(BaseIPSolver):
    """
    k-approximation for covering programs with at most k nonzeros per row.

    The solution satisfies `c.x <= k * lp_value <= k * OPT`, where `lp_value` is the
    optimum of the knapsack-cover strengthened LP.

    With `replace_rows=False` the rows are only clipped and scaled, the cut loop runs
    on them directly and the rounding uses k + 1, giving a (k + 1)-approximation
    against the unreplaced knapsack-cover LP.

    Args:
        lp_engine (LPEngine, optional): Engine used for the LP solves.
        replace_rows (bool): Rewrite rows into k-roundable form before solving.
        max_rounds (int): Upper limit on cutting-plane rounds. The loop always
            terminates on its own; the limit guards against runaway instances.
    """

    _tags = {
        "sense": "cover",
        "algorithm": "cover-k",
        "ratio": "k",
    }

    def __init__(self, lp_engine=None, replace_rows=True, max_rounds=10_000):
        self.replace_rows = replace_rows
        self.max_rounds = max_rounds
        super().__init__(lp_engine=lp_engine)
        self._validate_hyperparams()

    def _validate_hyperparams(self):
        if self.max_rounds <= 0:
            raise ValueError("max_rounds must be greater than 0.")

    def _solve(self, inst: SparseIP):
        # rows with b_i = 0 hold for every x >= 0
        demanding = [i for i in range(inst.nrows) if inst.b[i] > 0]
        new_row = {i: pos for pos, i in enumerate(demanding)}
        normalized = normalize_cover(
            inst.replace(
                nrows=len(demanding),
                entries=tuple((new_row[i], j, a) for i, j, a in inst.entries if i in new_row),
                b=tuple(inst.b[i] for i in demanding),
            )
        )
        k = max(1, normalized.row_sparsity())

        if self.replace_rows:
            rho = k
            rows = [make_roundable(row, k) for row in normalized.rows]
            working = normalized.replace(
                entries=tuple((i, j, a) for i, row in enumerate(rows) for j, a in row.coeffs)
            )
            rows_replaced = sum(1 for row in rows if row.replaced)
        else:
            # clipped rows with at most k entries are (k + 1)-roundable
            rho = k + 1
            working = normalized
            rows_replaced = 0

        cuts: List[KcCut] = []
        seen: Set[Tuple[int, FrozenSet[int]]] = set()
        iterations = 0
        while True:
            iterations += 1
            if iterations > self.max_rounds:
                raise InvariantViolation(
                    f"cutting-plane loop did not settle within {self.max_rounds} rounds"
                )
            solution = self._solve_lp(
                lp_relaxation(working, [cut.to_lp_row() for cut in cuts])
            )
            if solution.status is Status.INFEASIBLE:
                raise InfeasibleInstance("the LP relaxation is infeasible")
            if not solution.is_optimal:
                raise InvariantViolation(f"covering LP returned {solution.status.value}")
            x = solution.x

            added = 0
            for i, row in enumerate(working.rows):
                fixed = frozenset(
                    j for j in row if working.d[j] is not None and rho * x[j] >= working.d[j]
                )
                if not fixed or (i, fixed) in seen:
                    continue
                cut = kc_cut(working, i, fixed)
                if cut is None or not cut.is_violated_by(x):
                    continue
                seen.add((i, fixed))
                cuts.append(cut)
                added += 1
                logger.debug("added knapsack-cover cut on row %d fixing %s", i, sorted(fixed))
            if not added:
                break

        integral = all(v.denominator == 1 for v in x)
        if integral:
            x_hat = [int(v) for v in x]
        else:
            x_hat = _round_down(x, working.d, rho)

        if not inst.is_feasible(x_hat):
            raise InvariantViolation("rounded covering solution is infeasible")
        sol = IntSolution.from_x(inst, x_hat)
        if sol.objective > rho * solution.value:
            raise InvariantViolation(
                f"cost {sol.objective} exceeds {rho} * lp_value = {rho * solution.value}"
            )

        naive = naive_lp_value(inst, self.engine)
        report = {
            "k": k,
            "lp_value": solution.value,
            "naive_lp_value": naive,
            "iterations": iterations,
            "cuts_added": len(cuts),
            "cuts": [[cut.row, sorted(cut.fixed)] for cut in cuts],
            "replace_rows": self.replace_rows,
            "rows_replaced": rows_replaced,
            "integral_lp": integral,
            "ratio_bound": Fraction(rho),
        }
        self.cuts_ = tuple(cuts)
        return sol, report


def solve_cover(inst: SparseIP, lp_engine=None):
    """Run `CoverSolver` on `inst` and return its `SolveResult`."""
    return CoverSolver(lp_engine=lp_engine).solve(inst)
