"""Solver-independent feasibility checking of integral solutions."""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from sparseip.instance import Sense, SparseIP, check_instance

__all__ = ["SolutionViolation", "check_solution"]


@dataclass(frozen=True)
class SolutionViolation:
    """A failed check: `kind` is "length", "integrality", "bound", "row" or "objective".

    For row violations `slack` is (a_i.x - b_i) for covering and (b_i - a_i.x) for
    packing, so a violated row always has negative slack.
    """

    kind: str
    message: str
    index: Optional[int] = None
    slack: Optional[Fraction] = None

    def __str__(self):
        return self.message


def check_solution(
    inst: SparseIP, x: Sequence, objective: Optional[Fraction] = None
) -> List[SolutionViolation]:
    """Check x against integrality, 0 <= x <= d and every row, exactly.

    The rows are recomputed from the entry list; nothing is shared with the solvers.

    Args:
        inst (SparseIP): The instance.
        x (Sequence): Candidate point.
        objective (Fraction, optional): Claimed objective, compared with c.x if given.

    Returns:
        list: Empty iff x is feasible (and the claimed objective is right).

    Raises:
        InvalidInstance: If the instance itself does not validate.
    """
    check_instance(inst)
    if len(x) != inst.ncols:
        return [
            SolutionViolation(
                "length", f"solution has {len(x)} entries, instance has {inst.ncols} columns"
            )
        ]
    violations: List[SolutionViolation] = []
    values = [Fraction(v) for v in x]
    for j, v in enumerate(values):
        if v.denominator != 1:
            violations.append(SolutionViolation("integrality", f"x[{j}] = {v} not integral", j))
        dj = inst.d[j]
        if v < 0 or (dj is not None and v > dj):
            violations.append(SolutionViolation("bound", f"bound {j}: x = {v}, d = {dj}", j))

    activity = [Fraction(0)] * inst.nrows
    for i, j, a in inst.entries:
        activity[i] += a * values[j]
    for i, (lhs, bi) in enumerate(zip(activity, inst.b)):
        slack = lhs - bi if inst.sense is Sense.COVER else bi - lhs
        if slack < 0:
            violations.append(
                SolutionViolation("row", f"row {i} violated with slack {slack}", i, slack)
            )

    if objective is not None:
        actual = sum((cj * v for cj, v in zip(inst.c, values)), Fraction(0))
        if actual != Fraction(objective):
            violations.append(
                SolutionViolation(
                    "objective", f"claimed objective {objective}, actual {actual}"
                )
            )
    return violations
