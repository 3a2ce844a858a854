"""Approximation algorithms for row-sparse covering and column-sparse packing integer programs."""

from .errors import (
    BudgetExceeded,
    InfeasibleInstance,
    InvalidInstance,
    InvariantViolation,
    SolverError,
    UnboundedInstance,
)
from .instance import IntSolution, Sense, SparseIP, check_instance, validate
from .oracle import ExactSolver, solve_exact
from .solvers import (
    AutoSolver,
    CoverSolver,
    Pack2CSSolver,
    PackSolver,
    PackWidthSolver,
    make_solver,
    solve_cover,
    solve_pack,
    solve_pack_2cs,
    solve_pack_width,
)
from .utils.serialization import parse_instance, parse_solution, serialize_instance
from .verify import check_solution

__version__ = "0.1.0"
