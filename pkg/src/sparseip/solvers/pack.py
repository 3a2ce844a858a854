"""Approximation algorithms for packing programs with at most k nonzeros per column.

All variants start from the iterated solver: round the first extreme LP optimum
down to x0, then repeatedly re-solve the residual LP on the still fractional
columns, fixing 0/1 values and relaxing ("marking special") rows that touch few
fractional columns. The result x0 + x1 violates each row by at most the special
entries; the variants differ in how they turn it into a feasible point.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.utils import UnionFind

from sparseip.engine import LpProblem, LpRow, Objective, Relation, SimplexEngine, Status
from sparseip.errors import (
    InvariantViolation,
    StructureViolation,
    UnboundedInstance,
    WidthTooSmall,
)
from sparseip.instance import (
    IntSolution,
    Sense,
    SparseIP,
    lp_relaxation,
    normalize_pack_width,
    preprocess_pack,
    restore_columns,
)
from sparseip.logger import logger
from sparseip.solvers.base import BaseIPSolver
from sparseip.solvers.conflict import ConflictDigraph, color_digraph, conflict_graph

__all__ = [
    "IterationRecord",
    "IteratedOutcome",
    "Decomposition",
    "iterated_solve",
    "check_outcome",
    "decompose",
    "PackSolver",
    "Pack2CSSolver",
    "PackWidthSolver",
    "solve_pack",
    "solve_pack_2cs",
    "solve_pack_width",
]

_ONE = Fraction(1)


@dataclass(frozen=True)
class IterationRecord:
    """One residual solve: total LP value c.(x0 + x1 + x*), rows left and fractional columns."""

    lp_value: Fraction
    rows: int
    cols: int


@dataclass(frozen=True)
class IteratedOutcome:
    """
    Result of the iterated solver.

    Attributes:
        x0 (tuple): Rounded-down first LP optimum.
        x1 (tuple): 0-1 vector of the columns fixed at 1 by later residual solves.
        special (frozenset): Special entries (i, j), ignored in row i from then on.
        trace (tuple): One `IterationRecord` per residual solve.
        lp_value (Fraction): Value of the initial LP relaxation.
        threshold (int): Rows with at most this many fractional columns were relaxed.
        matching (tuple): Columns set aside as cycle edges (2-CS variant only).
    """

    x0: Tuple[int, ...]
    x1: Tuple[int, ...]
    special: FrozenSet[Tuple[int, int]]
    trace: Tuple[IterationRecord, ...]
    lp_value: Fraction
    threshold: int
    matching: Tuple[int, ...] = ()

    @property
    def total(self) -> Tuple[int, ...]:
        return tuple(a + b for a, b in zip(self.x0, self.x1))

    def value(self, inst: SparseIP) -> Fraction:
        """c.(x0 + x1) plus the cost of the set-aside matching columns."""
        return inst.objective(self.total) + sum(
            (inst.c[j] for j in self.matching), Fraction(0)
        )

    def special_per_row(self) -> Counter:
        return Counter(i for i, _ in self.special)


@dataclass(frozen=True)
class Decomposition:
    """Partition of the support of x1 into feasible 0-1 vectors."""

    classes: Tuple[Tuple[int, ...], ...]
    coloring: Dict[int, int] = field(default_factory=dict, compare=False)

    @property
    def r(self) -> int:
        return len(self.classes)


def _check_preprocessed(inst: SparseIP):
    if inst.sense is not Sense.PACK:
        raise ValueError("expected a packing instance")
    for i, j, a in inst.entries:
        if a > inst.b[i]:
            raise ValueError(
                f"entry ({i},{j}) = {a} exceeds b[{i}] = {inst.b[i]}; run preprocess_pack first"
            )
    for j, col in enumerate(inst.cols):
        if not col and inst.d[j] is None and inst.c[j] > 0:
            raise UnboundedInstance(f"column {j} is empty with c > 0 and no multiplicity bound")


def _extract_matching(inst: SparseIP, fractional: Sequence[int]) -> List[int]:
    """Pick one cycle-closing column per component of the graph rows x fractional columns.

    Columns are edges between their (at most two) rows, single-row columns are loops.
    A basic optimum leaves at most one cycle per component.
    """
    components = UnionFind()
    closing = []
    for j in sorted(fractional):
        rows = sorted(inst.cols[j])
        if len(rows) > 2:
            raise ValueError(f"column {j} has {len(rows)} nonzeros; expected at most 2")
        if not rows:
            continue
        if len(rows) == 1 or components[rows[0]] == components[rows[1]]:
            closing.append(j)
        else:
            components.union(rows[0], rows[1])
    per_component = Counter(components[min(inst.cols[j])] for j in closing)
    crowded = sorted(root for root, count in per_component.items() if count > 1)
    if crowded:
        raise StructureViolation(
            f"component of row {crowded[0]} has {per_component[crowded[0]]} cycles"
        )
    return closing


def _residual_problem(inst, cols, x0, x1, special) -> LpProblem:
    position = {j: p for p, j in enumerate(cols)}
    rows = []
    for i, row in enumerate(inst.rows):
        coeffs = {position[j]: a for j, a in row.items() if j in position and (i, j) not in special}
        if not coeffs:
            continue
        used = sum((a * x0[j] for j, a in row.items()), Fraction(0)) + sum(
            (a * x1[j] for j, a in row.items() if (i, j) not in special), Fraction(0)
        )
        rows.append(LpRow.build(coeffs, Relation.LE, inst.b[i] - used))
    return LpProblem(
        Objective.MAX,
        tuple(inst.c[j] for j in cols),
        tuple(rows),
        upper=(_ONE,) * len(cols),
    )


def _iterate(inst: SparseIP, engine, threshold: int, extract_matching: bool) -> IteratedOutcome:
    _check_preprocessed(inst)
    first = engine.solve(lp_relaxation(inst))
    if first.status is Status.UNBOUNDED:
        raise UnboundedInstance("the LP relaxation is unbounded")
    if not first.is_optimal:
        raise InvariantViolation(f"packing LP returned {first.status.value}")

    n = inst.ncols
    x0 = [math.floor(v) for v in first.x]
    x1 = [0] * n
    fractional = sorted(j for j, v in enumerate(first.x) if v.denominator != 1)
    matching: List[int] = []
    if extract_matching:
        matching = _extract_matching(inst, fractional)
        set_aside = set(matching)
        fractional = [j for j in fractional if j not in set_aside]

    live_rows = set(range(inst.nrows))
    special = set()
    trace = []
    while fractional:
        residual = engine.solve(_residual_problem(inst, fractional, x0, x1, special))
        if not residual.is_optimal:
            raise InvariantViolation(f"residual LP returned {residual.status.value}")
        trace.append(
            IterationRecord(
                inst.objective(x0) + inst.objective(x1) + residual.value,
                len(live_rows),
                len(fractional),
            )
        )
        logger.debug(
            "iteration %d: %d rows, %d fractional columns, value %s",
            len(trace),
            len(live_rows),
            len(fractional),
            trace[-1].lp_value,
        )

        still = []
        for j, v in zip(fractional, residual.x):
            if v == 1:
                x1[j] = 1
            elif v != 0:
                still.append(j)
        progress = len(still) < len(fractional)
        fractional = still
        if not fractional:
            break

        members = set(fractional)
        for i in sorted(live_rows):
            touching = [j for j in inst.rows[i] if j in members]
            if len(touching) <= threshold:
                special.update((i, j) for j in touching)
                live_rows.discard(i)
                progress = True
        if not progress:
            raise InvariantViolation(
                f"iterated solver stalled with {len(fractional)} fractional columns"
            )

    return IteratedOutcome(
        x0=tuple(x0),
        x1=tuple(x1),
        special=frozenset(special),
        trace=tuple(trace),
        lp_value=first.value,
        threshold=threshold,
        matching=tuple(matching),
    )


def iterated_solve(inst: SparseIP, lp_engine=None, threshold: Optional[int] = None) -> IteratedOutcome:
    """Run the iterated solver on a preprocessed packing instance.

    Args:
        inst (SparseIP): Packing instance with every A_ij <= b_i.
        lp_engine (LPEngine, optional): Engine for the LP solves.
        threshold (int, optional): Relax rows with at most this many fractional
            columns. Defaults to the column sparsity k.

    Returns:
        IteratedOutcome: x0, x1 and the special entries; `check_outcome` holds on it.

    Raises:
        UnboundedInstance: If an empty column has c_j > 0 and no multiplicity bound.
    """
    engine = lp_engine if lp_engine is not None else SimplexEngine()
    if threshold is None:
        threshold = inst.col_sparsity()
    outcome = _iterate(inst, engine, threshold, extract_matching=False)
    check_outcome(inst, outcome)
    return outcome


def check_outcome(inst: SparseIP, outcome: IteratedOutcome):
    """Verify the guarantees of an iterated-solver outcome exactly.

    Checks that x0 + x1 stays within d with x1 in {0, 1}, that no row has more than
    `threshold` special entries, that A x0 + A' x1 <= b where A' drops the special
    entries, that each row exceeds b_i by at most threshold * max_j A_ij, and that
    c.(x0 + x1), plus any matching columns, reaches the initial LP value.

    Raises:
        InvariantViolation: Naming the first failed check.
    """
    total = outcome.total
    for j, (value, extra, dj) in enumerate(zip(total, outcome.x1, inst.d)):
        if extra not in (0, 1):
            raise InvariantViolation(f"x1[{j}] = {extra} is not 0-1")
        if dj is not None and value > dj:
            raise InvariantViolation(f"x0 + x1 exceeds d at column {j}")

    for i, count in outcome.special_per_row().items():
        if count > outcome.threshold:
            raise InvariantViolation(
                f"row {i} has {count} special entries, more than {outcome.threshold}"
            )

    for i, row in enumerate(inst.rows):
        reduced = sum((a * outcome.x0[j] for j, a in row.items()), Fraction(0)) + sum(
            (a * outcome.x1[j] for j, a in row.items() if (i, j) not in outcome.special),
            Fraction(0),
        )
        if reduced > inst.b[i]:
            raise InvariantViolation(f"row {i} exceeds b without its special entries")
        full = sum((a * total[j] for j, a in row.items()), Fraction(0))
        largest = max(row.values(), default=Fraction(0))
        if full > inst.b[i] + outcome.threshold * largest:
            raise InvariantViolation(f"row {i} exceeds b by more than its violation bound")

    if outcome.value(inst) < outcome.lp_value:
        raise InvariantViolation(
            f"outcome value {outcome.value(inst)} below LP value {outcome.lp_value}"
        )


def _indicator(n: int, columns) -> Tuple[int, ...]:
    members = set(columns)
    return tuple(1 if j in members else 0 for j in range(n))


def decompose(inst: SparseIP, outcome: IteratedOutcome) -> Decomposition:
    """Split the support of x1 into at most 2k^2 + 1 feasible 0-1 vectors.

    Raises:
        DegreeContractViolated: If the conflict digraph breaks its indegree bound.
        InvariantViolation: If a colour class is infeasible.
    """
    k = inst.col_sparsity()
    digraph = ConflictDigraph.from_outcome(inst, outcome, max_indegree=k * k)
    coloring = color_digraph(digraph, k * k)
    by_color: Dict[int, List[int]] = {}
    for node, color in coloring.items():
        by_color.setdefault(color, []).append(node)
    classes = tuple(_indicator(inst.ncols, by_color[color]) for color in sorted(by_color))
    for t, y in enumerate(classes, start=1):
        if not inst.is_feasible(y):
            raise InvariantViolation(f"colour class {t} is infeasible")
    return Decomposition(classes, coloring)


def _two_color(inst: SparseIP, outcome: IteratedOutcome) -> Optional[Decomposition]:
    digraph = ConflictDigraph.from_outcome(inst, outcome)
    graph = conflict_graph(digraph)
    try:
        sides = nx.bipartite.color(graph)
    except nx.NetworkXError:
        return None
    classes = tuple(
        _indicator(inst.ncols, [node for node, side in sides.items() if side == s])
        for s in (0, 1)
    )
    for t, y in enumerate(classes, start=1):
        if not inst.is_feasible(y):
            raise InvariantViolation(f"side {t} of the 2-colouring is infeasible")
    return Decomposition(classes, {node: side + 1 for node, side in sides.items()})


def _pick_best(inst: SparseIP, candidates):
    """Return (name, vector) of the first candidate of largest objective, and all values."""
    values = {}
    best = None
    for name, vector in candidates:
        if not inst.is_feasible(vector):
            raise InvariantViolation(f"candidate {name} is infeasible")
        values[name] = inst.objective(vector)
        if best is None or values[name] > values[best[0]]:
            best = (name, vector)
    return best, values


class _PackSolverMixin:
    def _finish(self, inst, deleted, x, lp_value, ratio_bound):
        solution = IntSolution.from_x(inst, restore_columns(x, deleted, inst.ncols))
        if not inst.is_feasible(solution.x):
            raise InvariantViolation("packing solution is infeasible")
        if solution.objective * ratio_bound < lp_value:
            raise InvariantViolation(
                f"value {solution.objective} times {ratio_bound} is below LP value {lp_value}"
            )
        return solution


class PackSolver(_PackSolverMixin, BaseIPSolver):
    """
    (2k^2 + 2)-approximation for packing programs with at most k nonzeros per column.

    Returns the best of x0 and the colour classes of the conflict digraph of x1.

    Args:
        lp_engine (LPEngine, optional): Engine used for the LP solves.
    """

    _tags = {
        "sense": "pack",
        "algorithm": "pack-general",
        "ratio": "2k^2 + 2",
    }

    def _solve(self, inst: SparseIP):
        reduced, deleted = preprocess_pack(inst)
        k = reduced.col_sparsity()
        outcome = iterated_solve(reduced, lp_engine=self.engine)
        decomposition = decompose(reduced, outcome)

        candidates = [("x0", outcome.x0)]
        candidates += [(f"y{t}", y) for t, y in enumerate(decomposition.classes, start=1)]
        (chosen, x), values = _pick_best(reduced, candidates)

        ratio_bound = Fraction(2 * k * k + 2)
        solution = self._finish(inst, deleted, x, outcome.lp_value, ratio_bound)
        report = {
            "k": k,
            "lp_value": outcome.lp_value,
            "ratio_bound": ratio_bound,
            "candidates": values,
            "chosen": chosen,
            "iterations": len(outcome.trace),
            "classes": decomposition.r,
            "special_entries": len(outcome.special),
            "deleted_columns": deleted,
        }
        self.outcome_ = outcome
        return solution, report


class Pack2CSSolver(_PackSolverMixin, BaseIPSolver):
    """
    4-approximation for packing programs with at most 2 nonzeros per column.

    Columns are edges (or loops) on the rows. One edge per cycle of the fractional
    support is set aside as the matching M, rows are relaxed once they touch a single
    fractional column, and x1 splits into two feasible sides of its conflict graph.
    If the conflict graph is not bipartite the general colouring is used instead
    and the report carries `fallback_used` with ratio bound 11.

    Args:
        lp_engine (LPEngine, optional): Engine used for the LP solves.
    """

    _tags = {
        "sense": "pack",
        "algorithm": "pack-2cs",
        "ratio": "4",
    }

    def _solve(self, inst: SparseIP):
        reduced, deleted = preprocess_pack(inst)
        if reduced.col_sparsity() > 2:
            raise ValueError(
                f"pack-2cs needs at most 2 nonzeros per column, got {reduced.col_sparsity()}"
            )
        outcome = _iterate(reduced, self.engine, threshold=1, extract_matching=True)
        check_outcome(reduced, outcome)

        decomposition = _two_color(reduced, outcome)
        fallback = decomposition is None
        if fallback:
            logger.warning("conflict graph is not bipartite; using the general colouring")
            decomposition = decompose(reduced, outcome)
        ratio_bound = Fraction(11 if fallback else 4)

        candidates = [("x0", outcome.x0), ("M", _indicator(reduced.ncols, outcome.matching))]
        candidates += [(f"y{t}", y) for t, y in enumerate(decomposition.classes, start=1)]
        (chosen, x), values = _pick_best(reduced, candidates)

        solution = self._finish(inst, deleted, x, outcome.lp_value, ratio_bound)
        report = {
            "k": reduced.col_sparsity(),
            "lp_value": outcome.lp_value,
            "ratio_bound": ratio_bound,
            "fallback_used": fallback,
            "matching": list(outcome.matching),
            "candidates": values,
            "chosen": chosen,
            "iterations": len(outcome.trace),
            "classes": decomposition.r,
            "special_entries": len(outcome.special),
            "deleted_columns": deleted,
        }
        self.outcome_ = outcome
        return solution, report


class PackWidthSolver(_PackSolverMixin, BaseIPSolver):
    """
    (1 + 2k/(W - k))-approximation for packing programs of width W > k.

    After normalising every row to b_i = 1, W is the smallest 1/A_ij. Starting from
    x = x0 + x1 of the iterated solver, the reducer repeatedly solves
    max{c.x : 0 <= x <= x_hat, a_i.x <= 1 - k/W for violated rows i} and rounds the
    extreme optimum up, until no row is violated.

    Args:
        lp_engine (LPEngine, optional): Engine used for the LP solves.
    """

    _tags = {
        "sense": "pack",
        "algorithm": "pack-width",
        "ratio": "1 + 2k/(W - k)",
    }

    def _solve(self, inst: SparseIP):
        reduced, deleted = preprocess_pack(inst)
        normalized = normalize_pack_width(reduced)
        k = normalized.col_sparsity()
        width = normalized.width()

        if width is None:
            x_hat = []
            for j, (cj, dj) in enumerate(zip(normalized.c, normalized.d)):
                if dj is None and cj > 0:
                    raise UnboundedInstance(
                        f"column {j} is empty with c > 0 and no multiplicity bound"
                    )
                x_hat.append(0 if dj is None else int(dj))
            solution = IntSolution.from_x(inst, restore_columns(x_hat, deleted, inst.ncols))
            return solution, {
                "k": k,
                "W": None,
                "lp_value": solution.objective,
                "ratio_bound": _ONE,
                "reducer_iterations": 0,
                "violated_rows": [],
                "deleted_columns": deleted,
            }
        if width <= k:
            raise WidthTooSmall(f"width {width} must exceed the column sparsity {k}")

        outcome = iterated_solve(normalized, lp_engine=self.engine)
        x_hat = list(outcome.total)
        slack = Fraction(k) / width
        previous = None
        violated_counts = []
        while True:
            activity = normalized.row_activity(x_hat)
            violated = [i for i, lhs in enumerate(activity) if lhs > 1]
            if violated_counts and len(violated) >= violated_counts[-1]:
                raise InvariantViolation(
                    f"reducer did not shrink the violated rows ({len(violated)})"
                )
            violated_counts.append(len(violated))
            if not violated:
                break
            rows = tuple(
                LpRow.build(normalized.rows[i], Relation.LE, _ONE - slack) for i in violated
            )
            reduced_lp = self._solve_lp(
                LpProblem(Objective.MAX, normalized.c, rows, upper=tuple(x_hat))
            )
            if not reduced_lp.is_optimal:
                raise InvariantViolation(f"reducer LP returned {reduced_lp.status.value}")
            if previous is not None and reduced_lp.value < previous:
                raise InvariantViolation("reducer LP value decreased")
            previous = reduced_lp.value
            logger.debug(
                "reducer: %d violated rows, LP value %s", len(violated), reduced_lp.value
            )
            x_hat = [math.ceil(v) for v in reduced_lp.x]

        ratio_bound = 1 + 2 * Fraction(k) / (width - k)
        solution = self._finish(inst, deleted, x_hat, outcome.lp_value, ratio_bound)
        report = {
            "k": k,
            "W": width,
            "lp_value": outcome.lp_value,
            "ratio_bound": ratio_bound,
            "iterations": len(outcome.trace),
            "reducer_iterations": len(violated_counts) - 1,
            "violated_rows": violated_counts,
            "deleted_columns": deleted,
        }
        self.outcome_ = outcome
        return solution, report


def solve_pack(inst: SparseIP, lp_engine=None):
    """Run `PackSolver` on `inst` and return its `SolveResult`."""
    return PackSolver(lp_engine=lp_engine).solve(inst)


def solve_pack_2cs(inst: SparseIP, lp_engine=None):
    """Run `Pack2CSSolver` on `inst` and return its `SolveResult`."""
    return Pack2CSSolver(lp_engine=lp_engine).solve(inst)


def solve_pack_width(inst: SparseIP, lp_engine=None):
    """Run `PackWidthSolver` on `inst` and return its `SolveResult`."""
    return PackWidthSolver(lp_engine=lp_engine).solve(inst)
