from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

from sktime.base import BaseObject

from sparseip.engine import LPEngine, LpProblem, LpSolution, SimplexEngine
from sparseip.instance import IntSolution, Sense, SparseIP, check_instance
from sparseip.logger import logger

__all__ = ["SolveResult", "BaseIPSolver"]


@dataclass(frozen=True)
class SolveResult:
    """Integral solution returned by a solver, with the solver's report."""

    solution: IntSolution
    report: Dict[str, Any] = field(default_factory=dict)

    @property
    def value(self):
        return self.solution.objective


class BaseIPSolver(BaseObject):
    """
    Base class for the sparse integer program solvers.

    Subclasses implement `_solve`, which receives a validated instance of the sense
    declared in the `"sense"` tag and returns the solution and a report dict. The
    `"algorithm"` tag names the variant in reports.

    Args:
        lp_engine (LPEngine, optional): Engine used for every LP solve. Defaults to a
            `SimplexEngine` with default settings.
    """

    _tags = {
        "sense": None,
        "algorithm": None,
        "ratio": None,
    }

    def __init__(self, lp_engine=None):
        self.lp_engine = lp_engine
        super().__init__()

    @property
    def engine(self) -> LPEngine:
        if self.lp_engine is None:
            return SimplexEngine()
        return self.lp_engine

    def solve(self, inst: SparseIP) -> SolveResult:
        """
        Validate `inst` and solve it.

        Args:
            inst (SparseIP): The instance.

        Returns:
            SolveResult: The solution and the report of the run.

        Raises:
            InvalidInstance: If the instance does not validate.
            ValueError: If the instance sense does not match the solver.
        """
        check_instance(inst)
        sense = self.get_tag("sense")
        if sense is not None and inst.sense is not Sense(sense):
            raise ValueError(
                f"{type(self).__name__} expects a {sense} instance, got {inst.sense.value}"
            )
        solution, report = self._solve(inst)
        report = {"algorithm": self.get_tag("algorithm"), **report}
        logger.info(
            "%s finished with objective %s", report["algorithm"], solution.objective
        )
        self.solution_ = solution
        self.report_ = report
        return SolveResult(solution, report)

    def _solve(self, inst: SparseIP) -> Tuple[IntSolution, Dict[str, Any]]:
        raise NotImplementedError("Must be implemented by subclass")

    def _solve_lp(self, problem: LpProblem) -> LpSolution:
        return self.engine.solve(problem)
