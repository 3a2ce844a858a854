"""Solve-and-compare runs: one `RunReport` per instance, collected into tables."""

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

import pandas as pd
from joblib import Parallel, delayed

from sparseip.errors import BudgetExceeded, ParameterError
from sparseip.generators.synthetic import gen_random
from sparseip.instance import IntSolution, Sense, SparseIP
from sparseip.logger import logger
from sparseip.oracle import DEFAULT_BUDGET, solve_exact
from sparseip.solvers.auto import make_solver
from sparseip.utils.serialization import format_rational, instance_digest, to_document

__all__ = [
    "FAMILIES",
    "COLUMNS",
    "RunReport",
    "observed_ratio",
    "run_instance",
    "run_campaign",
    "worst_ratio",
    "format_table",
]

# family -> (sense, generator mode, algorithm)
FAMILIES = {
    "cover": ("cover", "row-sparse", "cover-k"),
    "pack": ("pack", "col-sparse", "pack-general"),
    "pack-2cs": ("pack", "col-sparse", "pack-2cs"),
    "pack-width": ("pack", "col-sparse", "pack-width"),
}


@dataclass
class RunReport:
    """Outcome of solving one instance, optionally compared against the oracle.

    `observed_ratio` is cost/OPT for covering and OPT/value for packing; it is set
    only when the oracle finished.
    """

    digest: str
    algorithm: str
    solution: IntSolution
    lp_value: Optional[Fraction]
    ratio_bound: Optional[Fraction]
    wall_time: float
    oracle_value: Optional[Fraction] = None
    observed_ratio: Optional[Fraction] = None
    oracle_status: str = "skipped"
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def bound_violated(self) -> bool:
        if self.oracle_status != "optimal" or self.ratio_bound is None:
            return False
        # a missing ratio after an optimal oracle run is unbounded
        if self.observed_ratio is None:
            return True
        return self.observed_ratio > self.ratio_bound

    def to_dict(self) -> Dict[str, Any]:
        doc = to_document(asdict(self))
        doc["solution"] = to_document(self.solution)
        doc["bound_violated"] = self.bound_violated
        return doc


def observed_ratio(sense: Sense, value: Fraction, optimum: Fraction) -> Optional[Fraction]:
    """Ratio of the approximate to the optimal value, oriented to be at least 1.

    Zero optima give 1 when the value matches. None marks an unbounded ratio: a
    packing value of 0 against a positive optimum, or a positive covering cost
    against a zero optimum.
    """
    value, optimum = Fraction(value), Fraction(optimum)
    if Sense(sense) is Sense.COVER:
        if optimum == 0:
            return Fraction(1) if value == 0 else None
        return value / optimum
    if value == 0:
        return Fraction(1) if optimum == 0 else None
    return optimum / value


def run_instance(
    inst: SparseIP,
    algorithm: str = "auto",
    oracle: bool = False,
    budget: int = DEFAULT_BUDGET,
    lp_engine=None,
) -> RunReport:
    """Solve `inst` with `algorithm` and, if asked, compare against the exact optimum."""
    solver = make_solver(algorithm, lp_engine=lp_engine)
    start = time.perf_counter()
    result = solver.solve(inst)
    wall_time = time.perf_counter() - start
    report = result.report
    run = RunReport(
        digest=instance_digest(inst),
        algorithm=report["algorithm"],
        solution=result.solution,
        lp_value=report.get("lp_value"),
        ratio_bound=report.get("ratio_bound"),
        wall_time=wall_time,
        details={k: v for k, v in report.items() if k not in ("algorithm", "lp_value", "ratio_bound")},
    )
    if oracle:
        try:
            optimum = solve_exact(inst, limit=budget, lp_engine=lp_engine)
        except BudgetExceeded:
            logger.warning("oracle budget exceeded for instance %s", run.digest[:12])
            run.oracle_status = "budget-exceeded"
        else:
            run.oracle_value = optimum.objective
            run.oracle_status = "optimal"
            run.observed_ratio = observed_ratio(inst.sense, result.solution.objective, optimum.objective)
    return run


def _campaign_row(index, seed, family, n, m, k, denominator, d_mode, width, budget):
    sense, mode, algorithm = FAMILIES[family]
    if family == "pack-width" and width is None:
        width = 2 * k + 1
    inst = gen_random(
        [seed, index],
        sense,
        n,
        m,
        k,
        mode=mode,
        coeff_denominator_bound=denominator,
        d_mode=d_mode,
        width=width if family == "pack-width" else None,
    )
    run = run_instance(inst, algorithm=algorithm, oracle=True, budget=budget)
    return {
        "index": index,
        "digest": run.digest[:12],
        "algorithm": run.algorithm,
        "value": run.solution.objective,
        "lp_value": run.lp_value,
        "ratio_bound": run.ratio_bound,
        "oracle_value": run.oracle_value,
        "observed_ratio": run.observed_ratio,
        "oracle_status": run.oracle_status,
        "bound_violated": run.bound_violated,
        "fallback_used": bool(run.details.get("fallback_used", False)),
        "wall_time": run.wall_time,
    }


COLUMNS = [
    "index",
    "digest",
    "algorithm",
    "value",
    "lp_value",
    "ratio_bound",
    "oracle_value",
    "observed_ratio",
    "oracle_status",
    "bound_violated",
    "fallback_used",
    "wall_time",
]


def run_campaign(
    seed: int,
    count: int,
    family: str = "cover",
    n: int = 6,
    m: int = 6,
    k: int = 2,
    denominator: int = 5,
    d_mode: str = "mixed",
    width: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
    n_jobs: int = 1,
) -> pd.DataFrame:
    """Generate `count` instances of `family`, solve them and compare with the oracle.

    Instance `index` is generated from the seed sequence `[seed, index]`, so rows do
    not depend on `n_jobs`; the table is ordered by index.

    Returns:
        pd.DataFrame: One row per instance, columns as in `COLUMNS`.
    """
    if family not in FAMILIES:
        raise ParameterError(f"unknown family {family!r}; choose from {tuple(FAMILIES)}")
    if count < 0:
        raise ParameterError("count must be nonnegative")
    if family == "pack-2cs" and k > 2:
        raise ParameterError("the pack-2cs family needs k <= 2")
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_campaign_row)(index, seed, family, n, m, k, denominator, d_mode, width, budget)
        for index in range(count)
    )
    frame = pd.DataFrame(rows, columns=COLUMNS)
    logger.info(
        "campaign %s: %d instances, %d bound violations",
        family,
        len(frame),
        int(frame["bound_violated"].sum()) if len(frame) else 0,
    )
    return frame


def worst_ratio(frame: pd.DataFrame) -> Optional[Fraction]:
    ratios = [r for r in frame["observed_ratio"] if r is not None and not pd.isna(r)]
    return max(ratios) if ratios else None


def format_table(frame: pd.DataFrame) -> pd.DataFrame:
    """Copy of a campaign table with rationals rendered as "p/q" strings."""
    shown = frame.copy()
    for column in ("value", "lp_value", "ratio_bound", "oracle_value", "observed_ratio"):
        shown[column] = [
            "" if v is None or (not isinstance(v, Fraction) and pd.isna(v)) else format_rational(v)
            for v in shown[column]
        ]
    return shown
