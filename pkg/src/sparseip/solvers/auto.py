from sparseip.instance import Sense, SparseIP, normalize_pack_width, preprocess_pack
from sparseip.logger import logger
from sparseip.solvers.base import BaseIPSolver
from sparseip.solvers.cover import CoverSolver
from sparseip.solvers.pack import Pack2CSSolver, PackSolver, PackWidthSolver

__all__ = ["AutoSolver", "SOLVERS", "make_solver"]

SOLVERS = {
    "cover-k": CoverSolver,
    "pack-general": PackSolver,
    "pack-2cs": Pack2CSSolver,
    "pack-width": PackWidthSolver,
}


class AutoSolver(BaseIPSolver):
    """
    Pick the variant from the instance.

    Covering instances go to `CoverSolver`. Packing instances go to `Pack2CSSolver`
    when the column sparsity (after preprocessing) is 2 and to `PackSolver`
    otherwise; when the width exceeds the column sparsity, `PackWidthSolver` runs as
    well and the better solution is kept (the first one on ties).
    """

    _tags = {
        "sense": None,
        "algorithm": "auto",
    }

    def _solve(self, inst: SparseIP):
        if inst.sense is Sense.COVER:
            result = CoverSolver(lp_engine=self.lp_engine).solve(inst)
            return result.solution, result.report

        reduced, _ = preprocess_pack(inst)
        k = reduced.col_sparsity()
        primary = Pack2CSSolver if k == 2 else PackSolver
        results = [primary(lp_engine=self.lp_engine).solve(inst)]
        width = normalize_pack_width(reduced).width()
        if width is not None and width > k:
            results.append(PackWidthSolver(lp_engine=self.lp_engine).solve(inst))

        best = results[0]
        for result in results[1:]:
            if result.value > best.value:
                best = result
        logger.info("auto selected %s", best.report["algorithm"])
        report = dict(best.report)
        report["alternatives"] = {r.report["algorithm"]: r.value for r in results}
        return best.solution, report


def make_solver(algorithm: str, lp_engine=None) -> BaseIPSolver:
    """Instantiate the solver registered under `algorithm` ("auto" included)."""
    if algorithm == "auto":
        return AutoSolver(lp_engine=lp_engine)
    try:
        return SOLVERS[algorithm](lp_engine=lp_engine)
    except KeyError:
        raise ValueError(
            f"unknown algorithm {algorithm!r}; choose from auto, {', '.join(SOLVERS)}"
        ) from None
