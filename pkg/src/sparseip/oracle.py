"""Exact solver for small covering and packing programs.

Depth-first branch and bound over a finite box of integer points. Everything is
exact, so the results serve as ground truth for the approximation ratios.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sparseip.engine import LpProblem, SimplexEngine
from sparseip.errors import BudgetExceeded, InfeasibleInstance, UnboundedInstance
from sparseip.instance import IntSolution, Sense, SparseIP, check_instance, lp_relaxation
from sparseip.logger import logger
from sparseip.solvers.base import BaseIPSolver

__all__ = ["SearchBox", "search_box", "solve_exact", "enumerate_exact", "ExactSolver"]

DEFAULT_BUDGET = 1_000_000


@dataclass(frozen=True)
class SearchBox:
    """Per-variable upper bounds u; some optimum lies in {0..u_1} x ... x {0..u_n}."""

    upper: Tuple[int, ...]

    @property
    def volume(self) -> int:
        return math.prod(u + 1 for u in self.upper)


def search_box(inst: SparseIP) -> SearchBox:
    """Finite box containing an optimum.

    For covering, raising x_j above max_i ceil(b_i / A_ij) never helps a row, and
    costs are nonnegative. For packing, every row caps x_j at floor(b_i / A_ij).

    Raises:
        UnboundedInstance: For a packing column with c_j > 0, no rows and no bound.
    """
    upper = []
    for j, col in enumerate(inst.cols):
        dj = inst.d[j]
        if inst.sense is Sense.COVER:
            u = max((max(0, math.ceil(inst.b[i] / a)) for i, a in col.items()), default=0)
        elif col:
            u = min(math.floor(inst.b[i] / a) for i, a in col.items())
        elif inst.c[j] == 0:
            u = 0
        elif dj is None:
            raise UnboundedInstance(f"column {j} is empty with c > 0 and no multiplicity bound")
        else:
            u = int(dj)
        if dj is not None:
            u = min(u, int(dj))
        upper.append(u)
    return SearchBox(tuple(upper))


class _Search:
    """State of one branch-and-bound run."""

    def __init__(self, inst: SparseIP, box: SearchBox, limit: int, lp_bound: bool, engine):
        self.inst = inst
        self.box = box
        self.limit = limit
        self.lp_bound = lp_bound
        self.engine = engine
        self.cover = inst.sense is Sense.COVER
        self.order = sorted(range(inst.ncols), key=lambda j: (-inst.c[j], j))
        self.nodes = 0
        self.best: Optional[Tuple[int, ...]] = None
        self.best_value: Optional[Fraction] = None
        # suffix[t][i]: most that columns order[t:] can still add to row i
        self.suffix: List[List[Fraction]] = [[Fraction(0)] * inst.nrows]
        for j in reversed(self.order):
            row = list(self.suffix[0])
            for i, a in inst.cols[j].items():
                row[i] += a * box.upper[j]
            self.suffix.insert(0, row)

    def offer(self, x: Sequence[int]):
        value = self.inst.objective(x)
        if self.best_value is None or self._better(value, self.best_value):
            self.best = tuple(x)
            self.best_value = value

    def _better(self, value, incumbent) -> bool:
        return value < incumbent if self.cover else value > incumbent

    def _pruned(self, bound) -> bool:
        if self.best_value is None:
            return False
        return bound >= self.best_value if self.cover else bound <= self.best_value

    def _lp_bound(self, x, depth) -> Optional[Fraction]:
        fixed = set(self.order[:depth])
        lower = tuple(x[j] if j in fixed else 0 for j in range(self.inst.ncols))
        upper = tuple(x[j] if j in fixed else self.box.upper[j] for j in range(self.inst.ncols))
        relaxation = lp_relaxation(self.inst)
        problem = LpProblem(
            relaxation.objective, relaxation.c, relaxation.rows, lower=lower, upper=upper
        )
        solution = self.engine.solve(problem)
        return solution.value if solution.is_optimal else None

    def _cover_bound(self, activity, depth, partial) -> Optional[Fraction]:
        remaining = self.order[depth:]
        bound = partial
        for i, bi in enumerate(self.inst.b):
            need = bi - activity[i]
            if need <= 0:
                continue
            if self.suffix[depth][i] < need:
                return None
            # fractional knapsack: cheapest cost per unit of coverage first
            options = sorted(
                (self.inst.c[j] / self.inst.rows[i][j], j)
                for j in remaining
                if j in self.inst.rows[i] and self.box.upper[j] > 0
            )
            cost = Fraction(0)
            for ratio, j in options:
                take = min(need, self.inst.rows[i][j] * self.box.upper[j])
                cost += ratio * take
                need -= take
                if need <= 0:
                    break
            bound = max(bound, partial + cost)
        return bound

    def _pack_bound(self, activity, depth, partial) -> Fraction:
        bound = partial
        for j in self.order[depth:]:
            bound += self.inst.c[j] * self._pack_cap(j, activity)
        return bound

    def _pack_cap(self, j, activity) -> int:
        cap = self.box.upper[j]
        for i, a in self.inst.cols[j].items():
            cap = min(cap, math.floor((self.inst.b[i] - activity[i]) / a))
        return max(cap, 0)

    def run(self, x: List[int], activity: List[Fraction], depth: int, partial: Fraction):
        self.nodes += 1
        if self.nodes > self.limit:
            raise BudgetExceeded(f"node budget {self.limit} exhausted")

        if self.cover:
            bound = self._cover_bound(activity, depth, partial)
            if bound is None:
                return
        else:
            bound = self._pack_bound(activity, depth, partial)
        if self._pruned(bound):
            return
        if self.lp_bound and depth < len(self.order):
            bound = self._lp_bound(x, depth)
            if bound is None or self._pruned(bound):
                return

        if depth == len(self.order):
            self.offer(x)
            return

        j = self.order[depth]
        if self.cover:
            values = range(self.box.upper[j] + 1)
        else:
            values = range(self._pack_cap(j, activity), -1, -1)
        col = self.inst.cols[j]
        for v in values:
            x[j] = v
            for i, a in col.items():
                activity[i] += a * v
            self.run(x, activity, depth + 1, partial + self.inst.c[j] * v)
            for i, a in col.items():
                activity[i] -= a * v
        x[j] = 0


def solve_exact(
    inst: SparseIP,
    limit: int = DEFAULT_BUDGET,
    incumbent: Optional[Sequence[int]] = None,
    lp_bound: bool = False,
    lp_engine=None,
) -> IntSolution:
    """Optimal integral solution of a small instance.

    Columns are branched on in order of decreasing cost. Covering nodes are bounded
    below by the partial cost plus the best fractional-knapsack completion of any
    single row, packing nodes above by the partial value plus every remaining
    column at its largest still-feasible value. Among optimal points the first one
    reached wins, so the result is deterministic.

    Args:
        inst (SparseIP): The instance.
        limit (int): Node budget.
        incumbent (sequence, optional): Known feasible point to start pruning from.
        lp_bound (bool): Also bound every inner node by its LP relaxation.
        lp_engine (LPEngine, optional): Engine for the LP bounds.

    Raises:
        InfeasibleInstance: If no integral point is feasible.
        BudgetExceeded: If more than `limit` nodes are visited.
    """
    check_instance(inst)
    box = search_box(inst)
    engine = lp_engine if lp_engine is not None else SimplexEngine()
    search = _Search(inst, box, limit, lp_bound, engine)
    if incumbent is not None:
        incumbent = [int(v) for v in incumbent]
        if len(incumbent) != inst.ncols or not inst.is_feasible(incumbent):
            raise ValueError("incumbent is not a feasible point of the instance")
        search.offer(incumbent)
    search.run([0] * inst.ncols, [Fraction(0)] * inst.nrows, 0, Fraction(0))
    logger.debug("oracle visited %d nodes", search.nodes)
    if search.best is None:
        raise InfeasibleInstance("no integral point satisfies the constraints")
    return IntSolution(search.best, search.best_value)


def enumerate_exact(inst: SparseIP) -> IntSolution:
    """Optimum by enumerating the whole search box, without pruning."""
    check_instance(inst)
    box = search_box(inst)
    best = None
    for x in itertools.product(*(range(u + 1) for u in box.upper)):
        if not inst.is_feasible(x):
            continue
        value = inst.objective(x)
        if best is None or (value < best.objective if inst.sense is Sense.COVER else value > best.objective):
            best = IntSolution(tuple(x), value)
    if best is None:
        raise InfeasibleInstance("no integral point satisfies the constraints")
    return best


class ExactSolver(BaseIPSolver):
    """
    Branch-and-bound oracle wrapped as a solver.

    Args:
        budget (int): Node budget.
        lp_bound (bool): Bound inner nodes by their LP relaxation.
        lp_engine (LPEngine, optional): Engine for the LP bounds.
    """

    _tags = {
        "sense": None,
        "algorithm": "exact",
        "ratio": "1",
    }

    def __init__(self, budget=DEFAULT_BUDGET, lp_bound=False, lp_engine=None):
        self.budget = budget
        self.lp_bound = lp_bound
        super().__init__(lp_engine=lp_engine)
        self._validate_hyperparams()

    def _validate_hyperparams(self):
        if self.budget <= 0:
            raise ValueError("budget must be greater than 0.")

    def _solve(self, inst: SparseIP):
        solution = solve_exact(
            inst, limit=self.budget, lp_bound=self.lp_bound, lp_engine=self.lp_engine
        )
        return solution, {"ratio_bound": Fraction(1)}
