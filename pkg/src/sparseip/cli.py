"""Command line interface.

Every command writes one JSON document per line to standard output; logs go to
standard error. Exit codes: 0 success, 1 a checked guarantee failed (ratio bound
in campaigns or solves with --oracle, feasibility in `check`), 2 bad input or an
instance the solvers reject, 3 an internal invariant failed.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from sparseip.campaign import FAMILIES, format_table, run_campaign, run_instance, worst_ratio
from sparseip.errors import InfeasibleInstance, InvariantViolation, SolverError
from sparseip.generators import (
    FIXTURES,
    MODES,
    D_MODES,
    gen_gap_fixture,
    gen_hardness,
    gen_random,
    hardness_certificate,
    parse_formula,
)
from sparseip.instance import Sense, check_instance
from sparseip.logger import logger
from sparseip.oracle import DEFAULT_BUDGET, solve_exact
from sparseip.solvers.auto import SOLVERS
from sparseip.solvers.cover import CoverSolver
from sparseip.utils.serialization import (
    format_rational,
    instance_to_dict,
    parse_instance,
    parse_point,
    serialize_instance,
    solution_to_dict,
    to_document,
)
from sparseip.verify import check_solution

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_GUARANTEE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(to_document(doc)) + "\n")


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.path))
    run = run_instance(inst, algorithm=args.algorithm, oracle=args.oracle, budget=args.budget)
    _emit(run.to_dict())
    return EXIT_GUARANTEE if run.bound_violated else EXIT_OK


def cmd_check(args) -> int:
    inst = check_instance(parse_instance(_read(args.path)))
    x, objective = parse_point(_read(args.solution_path))
    violations = check_solution(inst, x, objective)
    _emit(
        {
            "feasible": not violations,
            "violations": [
                {"kind": v.kind, "message": v.message, "index": v.index, "slack": v.slack}
                for v in violations
            ],
        }
    )
    return EXIT_OK if not violations else EXIT_GUARANTEE


def cmd_oracle(args) -> int:
    inst = parse_instance(_read(args.path))
    try:
        solution = solve_exact(inst, limit=args.budget, lp_bound=args.lp_bound)
    except InfeasibleInstance:
        _emit({"status": "infeasible"})
        return EXIT_OK
    _emit({"status": "optimal", **solution_to_dict(solution)})
    return EXIT_OK


def cmd_gen_random(args) -> int:
    inst = gen_random(
        args.seed,
        args.sense,
        args.n,
        args.m,
        args.k,
        mode=args.mode,
        coeff_denominator_bound=args.denominator,
        d_mode=args.d_mode,
        width=args.width,
    )
    sys.stdout.write(serialize_instance(inst) + "\n")
    return EXIT_OK


def cmd_gen_gap(args) -> int:
    sys.stdout.write(serialize_instance(gen_gap_fixture(args.name, args.M)) + "\n")
    return EXIT_OK


def cmd_gen_hardness(args) -> int:
    gadget = gen_hardness(parse_formula(_read(args.formula)))
    _emit({**instance_to_dict(gadget.instance), "labels": gadget.labels()})
    return EXIT_OK


def _parse_assignment(text: str) -> List[int]:
    text = text.replace(",", "").replace(" ", "")
    if any(ch not in "01" for ch in text):
        raise ValueError(f"assignment must be a string of 0s and 1s, got {text!r}")
    return [int(ch) for ch in text]


def cmd_certify_hardness(args) -> int:
    formula = parse_formula(_read(args.formula))
    certificate = hardness_certificate(formula, _parse_assignment(args.assignment))
    _emit(
        {
            "x": [str(v) for v in certificate.x],
            "objective": format_rational(certificate.cost),
            "edges": list(certificate.edges),
            "m": formula.m,
            "unsatisfied": certificate.unsatisfied,
            "expected": 24 * formula.m + 3 * certificate.unsatisfied,
        }
    )
    return EXIT_OK


def cmd_campaign(args) -> int:
    frame = run_campaign(
        seed=args.seed,
        count=args.count,
        family=args.family,
        n=args.n,
        m=args.m,
        k=args.k,
        denominator=args.denominator,
        d_mode=args.d_mode,
        width=args.width,
        budget=args.budget,
        n_jobs=args.jobs,
    )
    violations = int(frame["bound_violated"].sum()) if len(frame) else 0
    summary = {
        "summary": {
            "count": len(frame),
            "worst_ratio": worst_ratio(frame) if len(frame) else None,
            "violations": violations,
            "fallbacks": int(frame["fallback_used"].sum()) if len(frame) else 0,
            "budget_exceeded": int((frame["oracle_status"] == "budget-exceeded").sum())
            if len(frame)
            else 0,
        }
    }
    if args.format == "table":
        if len(frame):
            sys.stdout.write(format_table(frame).to_string(index=False) + "\n")
    else:
        for record in frame.to_dict(orient="records"):
            _emit(record)
    _emit(summary)
    return EXIT_GUARANTEE if violations else EXIT_OK


def cmd_gap_probe(args) -> int:
    inst = parse_instance(_read(args.path))
    if inst.sense is not Sense.COVER:
        raise ValueError("gap-probe expects a covering instance")
    result = CoverSolver().solve(inst)
    plain = CoverSolver(replace_rows=False).solve(inst)
    optimum = solve_exact(inst, limit=args.budget).objective
    naive = result.report["naive_lp_value"]

    def gap(lp_value):
        return optimum / lp_value if lp_value else None

    _emit(
        {
            "naive_lp_value": naive,
            "kc_lp_value": result.report["lp_value"],
            "unreplaced_kc_lp_value": plain.report["lp_value"],
            "optimum": optimum,
            "naive_gap": gap(naive),
            "kc_gap": gap(result.report["lp_value"]),
            "unreplaced_kc_gap": gap(plain.report["lp_value"]),
            "cover_value": result.solution.objective,
            "unreplaced_cover_value": plain.solution.objective,
            "rows_replaced": result.report["rows_replaced"],
            "k": result.report["k"],
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparseip",
        description="Approximation algorithms for sparse covering and packing integer programs.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve an instance and print a run report")
    solve.add_argument("path", help="instance document, '-' for stdin")
    solve.add_argument("--algorithm", choices=["auto", *SOLVERS], default="auto")
    solve.add_argument("--oracle", action="store_true", help="compare against the exact optimum")
    solve.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="oracle node budget")
    solve.set_defaults(handler=cmd_solve)

    check = commands.add_parser("check", help="check a solution against an instance")
    check.add_argument("path")
    check.add_argument("solution_path")
    check.set_defaults(handler=cmd_check)

    oracle = commands.add_parser("oracle", help="solve an instance exactly")
    oracle.add_argument("path")
    oracle.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    oracle.add_argument("--lp-bound", action="store_true", help="bound nodes by their LP")
    oracle.set_defaults(handler=cmd_oracle)

    random_ = commands.add_parser("gen-random", help="generate a random instance")
    _add_instance_options(random_)
    random_.add_argument("--sense", choices=[s.value for s in Sense], default="cover")
    random_.add_argument("--mode", choices=MODES, default="row-sparse")
    random_.set_defaults(handler=cmd_gen_random)

    gap = commands.add_parser("gen-gap", help="generate a gap fixture")
    gap.add_argument("name", help=f"one of {', '.join(FIXTURES)}, optionally as name-M")
    gap.add_argument("--M", type=int, default=None)
    gap.set_defaults(handler=cmd_gen_gap)

    hardness = commands.add_parser("gen-hardness", help="build the gadget of a parity formula")
    hardness.add_argument("formula", help="formula file with lines 'i j k C'")
    hardness.set_defaults(handler=cmd_gen_hardness)

    certify = commands.add_parser(
        "certify-hardness", help="explicit gadget cover for an assignment"
    )
    certify.add_argument("formula")
    certify.add_argument("--assignment", required=True, help="0-1 string, e.g. 0110")
    certify.set_defaults(handler=cmd_certify_hardness)

    campaign = commands.add_parser("campaign", help="solve random instances against the oracle")
    _add_instance_options(campaign)
    campaign.add_argument("--count", type=int, default=100)
    campaign.add_argument("--family", choices=list(FAMILIES), default="cover")
    campaign.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    campaign.add_argument("--jobs", type=int, default=1, help="parallel workers (joblib n_jobs)")
    campaign.add_argument("--format", choices=["json", "table"], default="json")
    campaign.set_defaults(handler=cmd_campaign)

    probe = commands.add_parser("gap-probe", help="naive LP, KC-LP and optimum side by side")
    probe.add_argument("path")
    probe.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    probe.set_defaults(handler=cmd_gap_probe)
    return parser


def _add_instance_options(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=6, help="number of columns")
    parser.add_argument("--m", type=int, default=6, help="number of rows")
    parser.add_argument("--k", type=int, default=2, help="sparsity bound")
    parser.add_argument("--denominator", type=int, default=5, help="largest denominator")
    parser.add_argument("--d-mode", choices=list(D_MODES), default="mixed")
    parser.add_argument("--width", type=int, default=None)


def _configure_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    logger.setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except InvariantViolation as exc:
        logger.error("internal invariant failed: %s", exc)
        _emit({"error": str(exc), "type": type(exc).__name__})
        return EXIT_INTERNAL
    except (ValueError, TypeError, SolverError, OSError) as exc:
        _emit({"error": str(exc), "type": type(exc).__name__})
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
